"""Smoke test for the sphere_chaos_py extension module."""

import math

import sphere_chaos_py as sc


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    close(sc.gegenbauer(2, 2, 0.0), -0.5, 1e-15)
    close(sc.gegenbauer(2, 3, 0.0), -1.0 / 3.0, 1e-15)
    assert sc.gegenbauer_batch(2, 2, 0.0) == [1.0, 0.0, -0.5]
    assert sc.hermite(2, 3.0) == 8.0
    close(sc.bessel_j(0.5, math.pi), 0.0, 1e-15)
    close(sc.sphere_measure(3), 2 * math.pi ** 2, 1e-12)

    close(sc.moment_integral(10, 2, 2), 1 / 21, 1e-9)
    close(sc.asymptotic_constant(4, 2), 1.5 / math.pi ** 2, 1e-12)
    close(sc.asymptotic_constant(3, 3), math.pi / 4, 1e-6)
    assert sc.scaling_law(4, 2)[:2] == (-2, 1)
    close(sc.projection_variance(10, 2, 2), 32 * math.pi ** 2 / 21, 1e-8)

    grid = sc.SphereGrid(2, 16)
    assert len(grid) == 16 * 32 and grid.kind == "product"
    close(sum(grid.weights()), 4 * math.pi, 1e-10)
    sample = sc.FieldSampler(grid, 6).sample(3)
    assert sample.ell == 6 and len(sample.values) == len(grid)
    close(sample.excursion_volume(-10.0), 4 * math.pi, 1e-9)
    close(sample.hermite_projection(1), 0.0, 1e-10)
    assert abs(sample.defect()) <= 4 * math.pi
    h2 = sample.generic_functional([0.0, 0.0, 2.0])
    close(h2, sample.hermite_projection(2), 1e-12)
    again = sc.simulate(2, 6, 3, resolution=16)
    assert again.values == sample.values

    coeffs = sc.indicator_coeffs(1.0, 8)
    close(coeffs[2], math.exp(-0.5) / math.sqrt(2 * math.pi), 1e-15)

    s = sc.run_ensemble(2, 8, 32, "excursion", replicates=500, seed=1, z=1.0)
    target = 4 * math.pi * 0.5 * math.erfc(1 / math.sqrt(2))
    assert abs(s.mean - target) <= 4 * s.mean_stderr, (s.mean, target)
    assert s.ks_to_normal is not None and 0 <= s.ks_to_normal <= 1
    slope, r2 = sc.rate_fit([(l, 1.0 / l ** 2) for l in (8, 16, 32)])
    close(slope, -2.0, 1e-12)

    try:
        sc.gegenbauer(3, 2, 1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")
    print("smoke test passed")


if __name__ == "__main__":
    main()

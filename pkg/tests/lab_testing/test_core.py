import math
import time

import numpy as np
from hypothesis import given, settings as hsettings, strategies as st

from codebase.lab.catalogue import (
    Custom,
    Identity,
    Saturating,
    finite_kernel,
    random_kernel,
    single_kernel,
    zero_kernel,
)
from codebase.lab.core import (
    recover_forcing,
    relative_gap,
    resolvent,
    solve_by_representation,
    solve_detrended,
    solve_linear,
    solve_nonlinear,
)
from codebase.lab.errors import InputError, NonFiniteError, NonlinearityError
from codebase.lab.types import Kernel, LogTrajectory, Trajectory

from .base import BaseTestCase


def forcing(values, start=1):
    return Trajectory(start, np.asarray(values, dtype=float))


def random_system(rng, horizon):
    length = int(rng.integers(1, 5))
    kernel = random_kernel(rng.uniform(0.0, 0.95), length, int(rng.integers(2 ** 31)))
    return kernel, forcing(rng.uniform(-1.0, 1.0, horizon)), rng.uniform(-1.0, 1.0)


class SolveLinearTestCase(BaseTestCase):
    """solve_linear - 线性方程求解"""

    def test_zero_kernel(self):
        """零核: x(n) = H(n), x(0) = xi
        """
        H = forcing(np.arange(1, 11))
        x = solve_linear(zero_kernel(), H, 3.0, 10)
        self.assertEqual(x.start, 0)
        self.assertEqual(x.values[0], 3.0)
        np.testing.assert_array_equal(x.values[1:], np.arange(1, 11))

    def test_single_kernel_closed_form(self):
        """k=(c), H=0: x(n) = c^n xi
        """
        x = solve_linear(single_kernel(0.5), forcing(np.zeros(20)), 2.0, 20)
        np.testing.assert_allclose(x.values, 2.0 * 0.5 ** np.arange(21), rtol=1e-15)

    def test_recursion_by_hand(self):
        """两项核的前几步
        """
        kernel = finite_kernel([0.3, 0.2])
        x = solve_linear(kernel, forcing([1.0, 1.0, 1.0]), 1.0, 3)
        expected = [1.0, 0.3 + 1.0, 0.3 * 1.3 + 0.2 + 1.0]
        expected.append(0.3 * expected[2] + 0.2 * expected[1] + 1.0)
        np.testing.assert_allclose(x.values, expected, rtol=1e-15)

    def test_equivalence_random_systems(self):
        """200 个随机系统: 递推与表示公式一致
        """
        rng = np.random.default_rng(20190401)
        start = time.perf_counter()
        worst = 0.0
        for _ in range(200):
            kernel, H, xi = random_system(rng, 2000)
            x = solve_linear(kernel, H, xi, 2000)
            y = solve_by_representation(kernel, H, xi, 2000)
            worst = max(worst, relative_gap(x, y))
        self.assertLess(worst, 1e-10)
        self.assertLess(time.perf_counter() - start, 30.0)

    @hsettings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-0.3, 0.3), min_size=1, max_size=4),
           st.lists(st.floats(-10.0, 10.0), min_size=200, max_size=200),
           st.floats(-5.0, 5.0))
    def test_equivalence_property(self, coefficients, values, xi):
        """任意有界系统: 递推与表示公式一致
        """
        kernel = finite_kernel(coefficients)
        H = forcing(values)
        x = solve_linear(kernel, H, xi, 200)
        y = solve_by_representation(kernel, H, xi, 200)
        self.assertLess(relative_gap(x, y), 1e-10)

    def test_recover_forcing(self):
        """由解恢复外力
        """
        rng = np.random.default_rng(7)
        kernel, H, xi = random_system(rng, 500)
        x = solve_linear(kernel, H, xi, 500)
        recovered = recover_forcing(kernel, x)
        self.assertEqual(recovered.start, 1)
        self.assertLess(relative_gap(recovered, H), 1e-12)

    def test_forcing_index_zero_ignored(self):
        """H(0) 不参与计算
        """
        H0 = Trajectory(0, [5.0, 1.0, 2.0])
        H1 = forcing([1.0, 2.0])
        kernel = single_kernel(0.5)
        np.testing.assert_array_equal(solve_linear(kernel, H0, 1.0, 2).values,
                                      solve_linear(kernel, H1, 1.0, 2).values)

    def test_short_forcing(self):
        """外力长度不足
        """
        with self.assertRaises(InputError):
            solve_linear(single_kernel(0.5), forcing(np.ones(5)), 0.0, 10)

    def test_bad_horizon(self):
        """horizon 必须 >= 1
        """
        with self.assertRaises(InputError):
            solve_linear(single_kernel(0.5), forcing(np.ones(5)), 0.0, 0)

    def test_overflow(self):
        """超出双精度范围时报告首个溢出下标
        """
        with self.assertRaises(NonFiniteError) as cm:
            solve_linear(single_kernel(2.0), forcing(np.ones(2000)), 1.0, 2000)
        self.assertGreater(cm.exception.index, 1000)

    def test_non_finite_kernel(self):
        """核中含 NaN
        """
        with self.assertRaises(InputError):
            Kernel([0.5, math.nan])

    def test_hand_example(self):
        """k=(0.5, 0.25), H=0, xi=1: x = (1, 0.5, 0.5, 0.375)
        """
        x = solve_linear(finite_kernel([0.5, 0.25]), forcing(np.zeros(3)), 1.0, 3)
        np.testing.assert_array_equal(x.values, [1.0, 0.5, 0.5, 0.375])

    @hsettings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-0.2, 0.2), min_size=1, max_size=4),
           st.lists(st.floats(-10.0, 10.0), min_size=100, max_size=100),
           st.lists(st.floats(-10.0, 10.0), min_size=100, max_size=100),
           st.floats(-3.0, 3.0), st.floats(-3.0, 3.0),
           st.floats(-5.0, 5.0), st.floats(-5.0, 5.0))
    def test_linearity(self, coefficients, h1, h2, c1, c2, xi1, xi2):
        """x(c1 H1 + c2 H2) = c1 x(H1) + c2 x(H2)
        """
        kernel = finite_kernel(coefficients)
        x1 = solve_linear(kernel, forcing(h1), xi1, 100).values
        x2 = solve_linear(kernel, forcing(h2), xi2, 100).values
        H = forcing(c1 * np.asarray(h1) + c2 * np.asarray(h2))
        x = solve_linear(kernel, H, c1 * xi1 + c2 * xi2, 100).values
        scale = max(1.0, float(np.max(np.abs(c1 * x1) + np.abs(c2 * x2))))
        self.assertLessEqual(float(np.max(np.abs(x - (c1 * x1 + c2 * x2)))), 1e-12 * scale)

    def test_positivity(self):
        """k >= 0, H > 0, xi > 0: x > 0 且 x(n) > H(n)
        """
        rng = np.random.default_rng(42)
        for _ in range(50):
            kernel = random_kernel(rng.uniform(0.1, 1.5), int(rng.integers(1, 6)),
                                   int(rng.integers(2 ** 31)), nonnegative=True)
            H = forcing(rng.uniform(0.01, 1.0, 300))
            x = solve_linear(kernel, H, rng.uniform(0.01, 1.0), 300)
            self.assertTrue(np.all(x.values > 0.0))
            self.assertTrue(np.all(x.values[1:] > H.values))

    def test_recover_geometric_forcing(self):
        """k=(0.5, 0.25), H = 2^n: 恢复的外力与 2^n 相差 < 1e-12
        """
        n = np.arange(1, 61)
        H = forcing(2.0 ** n)
        x = solve_linear(finite_kernel([0.5, 0.25]), H, 1.0, 60)
        recovered = recover_forcing(finite_kernel([0.5, 0.25]), x)
        self.assertLess(relative_gap(recovered, H, floor=0.0), 1e-12)

    def test_relative_gap_floor(self):
        """小于峰值 1% 的分量按峰值的 1% 计
        """
        y = np.array([1.0, 1e-6])
        x = np.array([1.0, 1e-6 + 1e-9])
        self.assertClose(relative_gap(x, y), 1e-7, 1e-12)
        self.assertClose(relative_gap(x, y, floor=0.0), 1e-3, 1e-9)


class LogDomainTestCase(BaseTestCase):
    """对数域求解"""

    def test_matches_linear(self):
        """与普通求解一致
        """
        kernel = finite_kernel([0.3, 0.2, 0.1])
        H = forcing(np.arange(1, 501) ** 1.5)
        x = solve_linear(kernel, H, 1.0, 500)
        z = solve_linear(kernel, H, 1.0, 500, log_domain=True)
        self.assertIsInstance(z, LogTrajectory)
        self.assertLess(relative_gap(z.to_linear(), x), 1e-12)

    def test_past_double_range(self):
        """H = 2^n 在 n = 3000 时仍可求解, x/H -> 4/3
        """
        n = np.arange(1, 3001)
        H = LogTrajectory.positive(1, n * math.log(2.0))
        x = solve_linear(single_kernel(0.5), H, 0.0, 3000)
        ratio = math.exp(x.log_abs[-1] - H.log_abs[-1])
        self.assertClose(ratio, 4.0 / 3.0, 1e-9)

    def test_signed_values(self):
        """符号正确
        """
        H = forcing((-1.0) ** np.arange(1, 101) * np.arange(1, 101))
        kernel = finite_kernel([-0.4, 0.2])
        x = solve_linear(kernel, H, -2.0, 100)
        z = solve_linear(kernel, H, -2.0, 100, log_domain=True)
        self.assertLess(relative_gap(z.to_linear(), x), 1e-12)


class ResolventTestCase(BaseTestCase):
    """resolvent - 预解序列"""

    def test_geometric(self):
        """k=(c): r(n) = c^n
        """
        r = resolvent(single_kernel(0.7), 50)
        np.testing.assert_allclose(r.values, 0.7 ** np.arange(51), rtol=1e-14)

    def test_zero_kernel(self):
        """零核: r = delta
        """
        r = resolvent(zero_kernel(), 5)
        np.testing.assert_array_equal(r.values, [1, 0, 0, 0, 0, 0])

    def test_is_unforced_solution(self):
        """r 即 xi=1, H=0 的解
        """
        kernel = finite_kernel([0.3, -0.2, 0.1])
        r = resolvent(kernel, 100)
        x = solve_linear(kernel, forcing(np.zeros(100)), 1.0, 100)
        np.testing.assert_array_equal(r.values, x.values)


class SolveNonlinearTestCase(BaseTestCase):
    """solve_nonlinear - 非线性方程"""

    def test_identity_bitwise(self):
        """f = x 时与线性解逐位相同
        """
        rng = np.random.default_rng(3)
        kernel, H, xi = random_system(rng, 1000)
        x = solve_nonlinear(kernel, Identity(), H, xi, 1000)
        y = solve_linear(kernel, H, xi, 1000)
        np.testing.assert_array_equal(x.values, y.values)

    def test_custom_identity_matches(self):
        """自定义恒等函数走逐步递推, 结果一致
        """
        kernel = finite_kernel([0.3, 0.2])
        H = forcing(np.sin(np.arange(1, 301)))
        x = solve_nonlinear(kernel, Custom(lambda v: v), H, 0.5, 300)
        y = solve_linear(kernel, H, 0.5, 300)
        self.assertLess(relative_gap(x, y), 1e-12)

    def test_saturating_by_hand(self):
        """f(x) = x + x/(1+|x|) 的第一步
        """
        x = solve_nonlinear(single_kernel(0.5), Saturating(), forcing([1.0, 1.0]), 1.0, 2)
        self.assertClose(x.values[1], 0.5 * 1.5 + 1.0, 1e-15)

    def test_log_domain_matches(self):
        """非线性对数域求解
        """
        H = forcing(np.arange(1, 201, dtype=float))
        x = solve_nonlinear(single_kernel(0.5), Saturating(), H, 1.0, 200)
        z = solve_nonlinear(single_kernel(0.5), Saturating(), H, 1.0, 200, log_domain=True)
        self.assertLess(relative_gap(z.to_linear(), x), 1e-12)

    def test_non_finite_nonlinearity(self):
        """f 返回非有限值
        """
        f = Custom(lambda v: math.inf if v > 1 else v, name="blowup")
        with self.assertRaises(NonlinearityError) as cm:
            solve_nonlinear(single_kernel(0.5), f, forcing(np.ones(10)), 2.0, 10)
        self.assertEqual(cm.exception.name, "blowup")


class SolveDetrendedTestCase(BaseTestCase):
    """solve_detrended - 几何尺度下的 x/a"""

    def test_matches_direct(self):
        """与直接求解后相除一致
        """
        rng = np.random.default_rng(11)
        n = np.arange(1, 201)
        h = rng.uniform(0.0, 1.0, 200)
        kernel = finite_kernel([0.5, 0.1])
        x = solve_linear(kernel, forcing(h * 2.0 ** n), 1.0, 200)
        z = solve_detrended(kernel, forcing(h), 1.0, 0.5)
        direct = x.values / 2.0 ** np.arange(201)
        self.assertLess(relative_gap(z, direct), 1e-12)

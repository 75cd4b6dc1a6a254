import math

import numpy as np

from codebase.lab.asymptotics import (
    ConvexFunctional,
    ScalingModel,
    dyadic_blocks,
    estimate_lambda,
    estimate_limsup,
    extract_almost_periodic,
    phi_average_bounds,
    ratios,
    time_average,
    verify_ergodic,
    verify_fluct,
    verify_growth2,
    verify_growth3,
    verify_periodic,
)
from codebase.lab.catalogue import (
    Saturating,
    Solow,
    finite_kernel,
    geometric_kernel,
    growth_sequence,
    single_kernel,
    zero_kernel,
)
from codebase.lab.core import solve_linear
from codebase.lab.errors import InputError, ParameterError, UndefinedRatioError
from codebase.lab.linearisation import linearisation_gap
from codebase.lab.types import LogTrajectory, Trajectory

from .base import BaseTestCase

N_FLUCT = 10000


def modulated(lam, factor, horizon):
    """lam^-n * factor(n) on 1..horizon, in log form"""
    n = np.arange(1, horizon + 1)
    values = np.array([factor(i) for i in n], dtype=float)
    return LogTrajectory(1, -n * math.log(lam) + np.log(np.abs(values)), np.sign(values))


def fluct_family(name, horizon=N_FLUCT):
    n = np.arange(1, horizon + 1, dtype=float)
    values = {
        "finite": n * (2.0 + np.sin(n)),
        "infinite": n ** 2,
        "zero": np.ones_like(n),
    }[name]
    return Trajectory(1, values)


class ScalingModelTestCase(BaseTestCase):
    """ScalingModel - 参考尺度 a"""

    def test_from_catalogue(self):
        """H3: a(n) = n, lambda = 1"""
        scale = ScalingModel.from_catalogue("H3", {}, 100)
        self.assertEqual(scale.a.start, 1)
        self.assertEqual(scale.lam, 1.0)
        self.assertTrue(scale.monotone)
        self.assertClose(scale.a.to_linear().values[-1], 100.0, 1e-12)

    def test_sqrt2log_starts_at_two(self):
        """sqrt(2 log n) 从 n = 2 开始为正"""
        scale = ScalingModel.from_catalogue("sqrt2log", {}, 100)
        self.assertEqual(scale.a.start, 2)

    def test_not_positive(self):
        """a 必须为正"""
        with self.assertRaises(ParameterError):
            ScalingModel.from_values([1.0, -1.0, 2.0], 1.0)

    def test_lambda_out_of_range(self):
        """lambda 不在 [0, 1]"""
        with self.assertRaises(ParameterError):
            ScalingModel.from_values([1.0, 2.0], 1.5)

    def test_ratio_past_scale(self):
        """a 的长度不足"""
        scale = ScalingModel.from_catalogue("H3", {}, 10)
        with self.assertRaises(InputError):
            scale.ratio(Trajectory(1, np.ones(20)))

    def test_ratio_skips_index_zero(self):
        """a 从 1 开始时 g/a 也从 1 开始"""
        scale = ScalingModel.from_catalogue("H3", {}, 10)
        ratio = scale.ratio(Trajectory(0, np.arange(11, dtype=float)))
        self.assertEqual(ratio.start, 1)
        np.testing.assert_allclose(ratio.values, np.ones(10), rtol=1e-12)


class LambdaEstimateTestCase(BaseTestCase):
    """estimate_lambda - 比值极限"""

    def test_geometric(self):
        """H6: lambda = 0.5"""
        estimate = estimate_lambda(growth_sequence("H6", {"lam": 0.5}, 1000, start=1))
        self.assertClose(estimate.lambda_hat, 0.5, 1e-12)
        self.assertTrue(estimate.converged)

    def test_polynomial(self):
        """H3: lambda = 1"""
        estimate = estimate_lambda(growth_sequence("H3", {}, 1000, start=1))
        self.assertClose(estimate.lambda_hat, 1.0, 1e-2)
        self.assertTrue(estimate.converged)

    def test_factorial(self):
        """H9: lambda = 0"""
        estimate = estimate_lambda(growth_sequence("H9", {}, 1000, start=1))
        self.assertLess(estimate.lambda_hat, 1e-2)
        self.assertTrue(estimate.converged)

    def test_oscillating_not_converged(self):
        """交替因子的比值不收敛"""
        H = modulated(0.5, lambda n: 1.0 + 0.5 * (-1) ** n, 400)
        self.assertFalse(estimate_lambda(H).converged)

    def test_too_short(self):
        """至少需要三个值"""
        with self.assertRaises(InputError):
            estimate_lambda(Trajectory(1, [1.0, 2.0]))

    def test_vanishing(self):
        """尾部为零时比值无定义"""
        with self.assertRaises(UndefinedRatioError):
            ratios(Trajectory(1, [1.0, 0.0, 1.0]))


class DyadicBlocksTestCase(BaseTestCase):
    """dyadic_blocks - 二进块划分"""

    def test_full_blocks(self):
        """[1, 15]"""
        self.assertEqual(dyadic_blocks(1, 15), [(1, 1), (2, 3), (4, 7), (8, 15)])

    def test_clipped_first_block(self):
        """起点不在 2 的幂上"""
        self.assertEqual(dyadic_blocks(250, 1000), [(250, 255), (256, 511), (512, 1000)])

    def test_short_last_block_merged(self):
        """过短的末块并入前一块"""
        self.assertEqual(dyadic_blocks(4, 18), [(4, 7), (8, 18)])


class LimsupTestCase(BaseTestCase):
    """estimate_limsup - Lambda_a 的三分类"""

    def setUp(self):
        self.scale = ScalingModel.from_catalogue("H3", {}, N_FLUCT)

    def test_finite(self):
        """n (2 + sin n) / n: 有限正"""
        estimate = estimate_limsup(fluct_family("finite"), self.scale)
        self.assertEqual(estimate.classification, "finite-positive")
        self.assertClose(estimate.value, 3.0, 1e-3)
        self.assertEqual(estimate.burn_in, 1 + N_FLUCT // 4)

    def test_infinite(self):
        """n^2 / n: 无穷"""
        estimate = estimate_limsup(fluct_family("infinite"), self.scale)
        self.assertEqual(estimate.classification, "infinite")
        self.assertEqual(estimate.value, math.inf)
        self.assertClose(estimate.observed, float(N_FLUCT), 1e-12)

    def test_zero(self):
        """1 / n: 零"""
        estimate = estimate_limsup(fluct_family("zero"), self.scale)
        self.assertEqual(estimate.classification, "zero")

    def test_logarithm_over_n(self):
        """log(n+1) / n: 零, 需要 N = 10^5

        N = 10^4 时末块最大值仍在 peak 的 1e-3 之上
        """
        for horizon, expected in ((10 ** 4, "finite-positive"), (10 ** 5, "zero")):
            n = np.arange(1, horizon + 1, dtype=float)
            scale = ScalingModel.from_catalogue("H3", {}, horizon)
            estimate = estimate_limsup(Trajectory(1, np.log(n + 1)), scale)
            self.assertEqual(estimate.classification, expected, horizon)

    def test_identically_zero(self):
        """g = 0"""
        estimate = estimate_limsup(Trajectory(1, np.zeros(100)), self.scale)
        self.assertEqual(estimate.classification, "zero")
        self.assertEqual(estimate.value, 0.0)

    def test_window_metadata(self):
        """报告窗口信息"""
        estimate = estimate_limsup(fluct_family("finite"), self.scale)
        self.assertEqual(estimate.blocks[-1][1], N_FLUCT)
        self.assertEqual(estimate.thresholds["growth_factor"], 2.0)
        self.assertIn("blocks", estimate.isimple)

    def test_too_few_blocks(self):
        """窗口太短"""
        with self.assertRaises(InputError):
            estimate_limsup(Trajectory(1, [1.0, 2.0, 3.0]), self.scale)


class Growth2TestCase(BaseTestCase):
    """verify_growth2 - x(n)/H(n) -> L(lambda)"""

    def test_lambda_zero(self):
        """H = n!, k = (0.1, 0.05)"""
        H = growth_sequence("H9", {}, 2000, start=1)
        result = verify_growth2(finite_kernel([0.1, 0.05]), H)
        self.assertLess(result.residual, 1e-6)
        self.assertLess(result.lambda_hat, 1e-2)
        self.assertTrue(result.summable)

    def test_factorial_with_known_lambda(self):
        """H = n!, k(l) = 0.3 * 0.5^l, 尺度给出 lambda = 0:
        L = 1, x(n)/H(n) - 1 约为 0.3/n
        """
        kernel = geometric_kernel(0.3, 0.5, 40)
        residuals = []
        for horizon in (200, 2000):
            H = growth_sequence("H9", {}, horizon, start=1)
            scale = ScalingModel.from_catalogue("H9", {}, horizon)
            result = verify_growth2(kernel, H, scale)
            self.assertEqual(result.L_theory, 1.0)
            self.assertGreater(result.lambda_hat, 0.0)
            residuals.append(result.residual)
        self.assertLess(residuals[0], 2e-3)
        self.assertLess(residuals[1], 2e-4)
        self.assertLess(residuals[1], residuals[0] / 5)

    def test_explicit_lambda_wins(self):
        """lam 参数优先于 scale"""
        H = growth_sequence("H6", {"lam": 0.5}, 200, start=1)
        scale = ScalingModel.from_catalogue("H6", {"lam": 0.5}, 200)
        result = verify_growth2(single_kernel(0.5), H, scale, lam=0.0)
        self.assertEqual(result.L_theory, 1.0)

    def test_lambda_half(self):
        """H = 2^n, k(l) = 0.3 * 0.5^l: L = 1.25"""
        H = growth_sequence("H6", {"lam": 0.5}, 1000, start=1)
        result = verify_growth2(geometric_kernel(0.3, 0.5, 40), H)
        self.assertClose(result.L_theory, 1.25, 1e-10)
        self.assertLess(result.residual, 1e-10)
        self.assertEqual(result.ratio.end, 1000)

    def test_lambda_one(self):
        """H = n^2, k = (0.5): L = 2"""
        H = Trajectory(1, np.arange(1, 20001, dtype=float) ** 2)
        result = verify_growth2(single_kernel(0.5), H)
        self.assertClose(result.L_theory, 2.0, 1e-3)
        self.assertLess(result.residual, 1e-2)


class Growth3TestCase(BaseTestCase):
    """verify_growth3 - x/a 的表示与反演"""

    def test_alternating_factor(self):
        """H = 2^n (1 + 0.25 (-1)^n)"""
        H = modulated(0.5, lambda n: 1.0 + 0.25 * (-1) ** n, 300)
        scale = ScalingModel.from_catalogue("H6", {"lam": 0.5}, 300)
        report = verify_growth3(single_kernel(0.5), H, scale)
        self.assertLess(report.residual_sup, 1e-10)
        self.assertLess(report.h_recovery_sup, 1e-10)
        self.assertTrue(report.decaying)
        self.assertEqual(report.predicted.start, 0)

    def test_signed_kernel(self):
        """有正有负的核"""
        H = modulated(0.8, lambda n: 2.0 + math.sin(n), 400)
        scale = ScalingModel.from_catalogue("H6", {"lam": 0.8}, 400)
        report = verify_growth3(finite_kernel([0.3, -0.2, 0.1]), H, scale, xi=0.0)
        self.assertLess(report.residual_sup, 1e-10)
        self.assertLess(report.h_recovery_sup, 1e-10)


class PeriodicTestCase(BaseTestCase):
    """周期部分的提取与预测"""

    PATTERN = [1.0, 2.0, 3.0, 1.5, 0.5, 2.5, 1.0]

    def test_extract_pure_periodic(self):
        """纯周期序列: 周期 7, 残差为零"""
        n = np.arange(1, 561)
        g = Trajectory(1, np.array(self.PATTERN)[n % 7])
        extraction = extract_almost_periodic(g)
        self.assertEqual(extraction.period, 7)
        self.assertTrue(extraction.periodic)
        self.assertLess(extraction.residual_sup, 1e-12)

    def test_extract_constant(self):
        """常数序列没有周期"""
        extraction = extract_almost_periodic(Trajectory(1, np.full(100, 2.0)))
        self.assertIsNone(extraction.period)
        self.assertFalse(extraction.periodic)
        self.assertClose(extraction.pattern[0], 2.0, 1e-15)

    def test_period_hint(self):
        """给定周期"""
        n = np.arange(1, 201)
        g = Trajectory(1, np.array(self.PATTERN)[n % 7] + 1.0 / n)
        extraction = extract_almost_periodic(g, period_hint=7)
        self.assertEqual(extraction.period, 7)
        self.assertLess(extraction.residual_sup, 0.05)

    def test_verify_periodic(self):
        """x/a 与 H/a 同周期, 模式满足卷积关系"""
        pattern = self.PATTERN
        H = modulated(0.5, lambda n: pattern[n % 7], 560)
        scale = ScalingModel.from_catalogue("H6", {"lam": 0.5}, 560)
        report = verify_periodic(single_kernel(0.5), H, scale)
        self.assertTrue(report.same_period)
        self.assertEqual(report.x_extraction.period, 7)
        self.assertLess(report.residual, 1e-3)
        self.assertLess(report.h_residual, 1e-3)

    def test_verify_periodic_with_hint(self):
        """lambda = e^-0.3, 给定周期"""
        lam = math.exp(-0.3)
        pattern = self.PATTERN
        H = modulated(lam, lambda n: pattern[n % 7], 600)
        scale = ScalingModel.from_catalogue("H6", {"lam": lam}, 600)
        report = verify_periodic(finite_kernel([0.3, 0.2]), H, scale, period_hint=7)
        self.assertTrue(report.same_period)
        self.assertLess(report.residual, 1e-3)
        self.assertLess(report.h_residual, 1e-3)

    def test_decaying_perturbation_keeps_fundamental_period(self):
        """sin(2 pi n/7) + 1/n: 周期 7, 而不是 7 的倍数"""
        for horizon in (500, 1000, 2000, 5000):
            n = np.arange(1, horizon + 1)
            g = Trajectory(1, np.sin(2 * math.pi * n / 7) + 1.0 / n)
            extraction = extract_almost_periodic(g)
            self.assertEqual(extraction.period, 7, horizon)
            self.assertTrue(extraction.periodic)
            self.assertLess(extraction.residual_sup, 1.0 / horizon)

    def test_verify_periodic_without_hint(self):
        """H/a = 2 + sin(2 pi n/7) + 1/n, k = (0.4), 不给周期
        """
        lam = math.exp(-0.3)
        H = modulated(lam, lambda n: 2.0 + math.sin(2 * math.pi * n / 7) + 1.0 / n, 600)
        scale = ScalingModel.from_catalogue("H6", {"lam": lam}, 600)
        report = verify_periodic(finite_kernel([0.4]), H, scale)
        self.assertTrue(report.same_period)
        self.assertEqual(report.h_extraction.period, 7)
        self.assertEqual(report.x_extraction.period, 7)
        self.assertLess(report.residual, 1e-3)


class ErgodicTestCase(BaseTestCase):
    """时间平均"""

    def test_time_average(self):
        """(1, 2, 3) 的 Cesaro 平均"""
        mu = time_average(Trajectory(1, [1.0, 2.0, 3.0]))
        np.testing.assert_allclose(mu.values, [1.0, 1.5, 2.0])

    def test_time_average_needs_index_one(self):
        """必须从下标 1 开始"""
        with self.assertRaises(InputError):
            time_average(Trajectory(2, [1.0, 2.0]))

    def test_verify_ergodic(self):
        """mu x = L mu H, H = 2^n (1 + 0.5 sin n)"""
        H = modulated(0.5, lambda n: 1.0 + 0.5 * math.sin(n), 5000)
        scale = ScalingModel.from_catalogue("H6", {"lam": 0.5}, 5000)
        report = verify_ergodic(single_kernel(0.5), H, scale)
        self.assertClose(report.multiplier, 4.0 / 3.0, 1e-12)
        self.assertClose(report.mu_H, 1.0, 1e-2)
        self.assertLess(report.gap, 1e-2)
        self.assertClose(report.recovered_mu_H, report.mu_H, 1e-2)


class ConvexFunctionalTestCase(BaseTestCase):
    """ConvexFunctional - 凸函数"""

    def test_kinds(self):
        """power / exp / hinge"""
        np.testing.assert_allclose(ConvexFunctional("power", p=2)([1.0, 3.0]), [1.0, 9.0])
        self.assertClose(float(ConvexFunctional("exp")(1.0)), math.e, 1e-15)
        np.testing.assert_array_equal(ConvexFunctional("hinge", c=1.0)([0.5, 1.0, 2.0]),
                                      [0.0, 0.0, 1.0])

    def test_o_regular_variation(self):
        """exp 不是 O-正则变化的"""
        self.assertTrue(ConvexFunctional("power").o_regularly_varying)
        self.assertFalse(ConvexFunctional("exp").o_regularly_varying)

    def test_invalid(self):
        """非法参数"""
        with self.assertRaises(ParameterError):
            ConvexFunctional("cosh")
        with self.assertRaises(ParameterError):
            ConvexFunctional("power", p=0.5)

    def test_log_mean(self):
        """log mean |v|^p"""
        phi = ConvexFunctional("power", p=2)
        self.assertClose(phi.log_mean(np.array([1.0, math.e])),
                         math.log((1.0 + math.e ** 2) / 2), 1e-12)


class PhiBoundsTestCase(BaseTestCase):
    """phi_average_bounds - 凸函数平均的上下界"""

    def test_iid_normal(self):
        """独立正态外力, phi = x^2"""
        rng = np.random.default_rng(5)
        H = Trajectory(1, rng.standard_normal(20000))
        kernel = single_kernel(0.5)
        x = solve_linear(kernel, H, 0.0, 20000)
        bounds = phi_average_bounds(kernel, x, H, ConvexFunctional("power", p=2))
        self.assertTrue(bounds.holds)
        self.assertTrue(bounds.dual_holds)
        self.assertClose(bounds.r_l1, 2.0, 1e-12)
        self.assertFalse(bounds.log_scale)

    def test_log_scale_fallback(self):
        """phi 溢出时改在对数尺度比较"""
        x = Trajectory(0, [0.0] + [1e200] * 99)
        H = Trajectory(1, [1e200] * 99)
        bounds = phi_average_bounds(zero_kernel(), x, H, ConvexFunctional("power", p=3))
        self.assertTrue(bounds.log_scale)
        self.assertTrue(bounds.holds)
        self.assertClose(bounds.lhs, 600 * math.log(10.0), 1e-9)


class FluctTestCase(BaseTestCase):
    """verify_fluct - Lambda_a|x| 与 Lambda_a|H|"""

    def setUp(self):
        self.scale = ScalingModel.from_catalogue("H3", {}, N_FLUCT)

    def test_families_single_kernel(self):
        """k = (0.5), 三类外力"""
        for name, expected in (("finite", "finite-positive"),
                               ("infinite", "infinite"),
                               ("zero", "zero")):
            report = verify_fluct(single_kernel(0.5), fluct_family(name), self.scale)
            self.assertEqual(report.h_estimate.classification, expected, name)
            self.assertTrue(report.agree, name)
            self.assertTrue(report.upper_holds, name)
            self.assertTrue(report.lower_holds, name)
            self.assertTrue(report.conv_holds, name)

    def test_families_signed_kernel(self):
        """k = (0.3, -0.2), 三类外力分类一致"""
        for name in ("finite", "infinite", "zero"):
            report = verify_fluct(finite_kernel([0.3, -0.2]), fluct_family(name), self.scale)
            self.assertTrue(report.agree, name)
            self.assertTrue(report.conv_holds, name)


class LinearisationTestCase(BaseTestCase):
    """linearisation_gap - 非线性解与线性化"""

    def test_saturating(self):
        """f(x) = x + x/(1+|x|), a = H = n"""
        scale = ScalingModel.from_catalogue("H3", {}, N_FLUCT)
        H = growth_sequence("H3", {}, N_FLUCT, start=1).to_linear()
        report = linearisation_gap(single_kernel(0.5), Saturating(), H, scale)
        self.assertTrue(report.decaying)
        self.assertLess(report.final_gap, 1e-3)
        self.assertTrue(report.classification_agrees)

    def test_solow(self):
        """Solow 型, 线性化斜率 1 - delta"""
        scale = ScalingModel.from_catalogue("H6", {"lam": 1 / 1.05}, 2000)
        H = growth_sequence("H6", {"lam": 1 / 1.05}, 2000, start=1).to_linear()
        report = linearisation_gap(single_kernel(0.5), Solow(0.1, 0.2), H, scale)
        self.assertClose(report.slope, 0.9, 1e-15)
        self.assertTrue(report.decaying)
        self.assertLess(report.final_gap, 1e-3)
        self.assertTrue(report.classification_agrees)

    def test_solow_uses_scaled_kernel(self):
        """Solow 型的线性比较解用核 (1 - delta) k, 而非 k"""
        horizon = 2000
        scale = ScalingModel.from_catalogue("H6", {"lam": 1 / 1.05}, horizon)
        H = growth_sequence("H6", {"lam": 1 / 1.05}, horizon, start=1).to_linear()
        kernel = single_kernel(0.5)
        report = linearisation_gap(kernel, Solow(0.1, 0.2), H, scale)
        expected = solve_linear(kernel.scaled(0.9), H, 0.0, horizon)
        np.testing.assert_array_equal(report.y.values, expected.values)

        unscaled = solve_linear(kernel, H, 0.0, horizon)
        gap = abs(report.x.values[-1] - unscaled.values[-1]) / scale.a.to_linear().values[-1]
        self.assertGreater(gap, 0.1)

    def test_solow_scaled_evaluation(self):
        """f(z e^l) e^-l 的缩放求值与直接求值一致"""
        f = Solow(0.1, 0.2)
        for z in (0.3, -0.7):
            for ell in (0.0, 5.0, 20.0):
                direct = f(z * math.exp(ell)) * math.exp(-ell)
                self.assertClose(f.scaled(z, ell), direct, 1e-12)

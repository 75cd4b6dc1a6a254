# pylint: disable=W0221,W0223

from codebase.experiment import Experiment
from codebase.lab.asymptotics import (
    phi_average_bounds,
    verify_ergodic,
    verify_fluct,
    verify_growth2,
    verify_growth3,
    verify_periodic,
)
from codebase.lab.core import solve_linear
from codebase.lab.linearisation import linearisation_gap
from codebase.lab.types import as_linear


class Growth2Experiment(Experiment):
    """x(n)/H(n) against the multiplier L(lambda)"""

    def run(self):
        kernel = self.config.kernel()
        H = self.config.forcing()
        scale = self.config.scaling() if "scaling" in self.config.data else None
        result = verify_growth2(kernel, H, scale, self.config.xi)

        self.stat(**result.isimple)
        self.write_series("x_over_H", result.ratio)
        self.check("limit_matches", result.residual < self.config.tolerance("residual", 1e-6))


class Growth3Experiment(Experiment):
    """x/a against the weighted resolvent average of H/a, and the inverse"""

    def run(self):
        report = verify_growth3(self.config.kernel(), self.config.forcing(),
                                self.config.scaling(), self.config.xi)
        tol = self.config.tolerance("residual", 1e-4)

        self.stat(**report.isimple)
        self.write_series("x_over_a", report.lambda_a_part)
        self.write_series("predicted_x_over_a", report.predicted)
        self.write_series("residual", report.residual)
        self.check("representation", report.residual_sup < tol)
        self.check("recovery", report.h_recovery_sup < tol)
        self.check("residual_decaying", report.decaying)


class PeriodicExperiment(Experiment):

    def run(self):
        report = verify_periodic(self.config.kernel(), self.config.forcing(),
                                 self.config.scaling(), self.config.get("period_hint"),
                                 self.config.xi)
        tol = self.config.tolerance("residual", 1e-3)

        self.stat(**report.isimple)
        self.write_series("x_periodic_part", report.x_extraction.pi)
        self.write_series("x_aperiodic_part", report.x_extraction.residual)
        self.check("same_period", report.same_period)
        self.check("representation", report.residual < tol)
        self.check("recovery", report.h_residual < tol)


class ErgodicExperiment(Experiment):

    def run(self):
        report = verify_ergodic(self.config.kernel(), self.config.forcing(),
                                self.config.scaling(), self.config.xi)

        self.stat(**report.isimple)
        self.write_series("x_time_average", report.x_average)
        self.check("time_average_identity",
                   report.gap < self.config.tolerance("residual", 1e-2))


class FluctExperiment(Experiment):
    """Lambda_a|x| and Lambda_a|H| bound each other and share a class"""

    def run(self):
        report = verify_fluct(self.config.kernel(), self.config.forcing(),
                              self.config.scaling(), self.config.xi,
                              slack=self.config.tolerance("fluct_slack"),
                              **self.config.limsup_options())

        self.stat(**report.isimple)
        self.write_series("limsup_blocks_x",
                          [(hi, m) for _, hi, m in report.x_estimate.blocks])
        self.write_series("limsup_blocks_H",
                          [(hi, m) for _, hi, m in report.h_estimate.blocks])
        self.check("upper_bound", report.upper_holds)
        self.check("lower_bound", report.lower_holds)
        self.check("classification_agrees", report.agree)
        self.check("convolution_bound", report.conv_holds)


class PhiExperiment(Experiment):
    """Tail averages of phi(|x|) against phi(|r|_1 |H|)"""

    def run(self):
        kernel = self.config.kernel()
        H = as_linear(self.config.forcing())
        x = solve_linear(kernel, H, self.config.xi, self.config.horizon)
        phi = self.config.phi()
        bounds = phi_average_bounds(kernel, x, H, phi)

        self.stat(phi=phi.isimple, **bounds.isimple)
        self.write_series("x", x)
        self.check("phi_bound", bounds.holds)
        self.check("dual_phi_bound", bounds.dual_holds)


class NonlinearExperiment(Experiment):
    """Nonlinear solution tracks its linearisation at infinity"""

    def run(self):
        f = self.config.nonlinearity()
        report = linearisation_gap(self.config.kernel(), f, self.config.forcing(),
                                   self.config.scaling(), self.config.xi,
                                   **self.config.limsup_options())

        self.stat(nonlinearity=f.isimple, **report.isimple)
        self.write_series("gap_over_a", report.gap)
        self.check("gap_decaying", report.decaying)
        self.check("gap_small", report.final_gap < self.config.tolerance("residual", 1e-3))
        self.check("classification_agrees", report.classification_agrees)

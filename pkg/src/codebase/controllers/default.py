# pylint: disable=W0221,W0223

from codebase.experiment import Experiment
from codebase.lab.asymptotics import estimate_lambda, estimate_limsup
from codebase.lab.core import (
    recover_forcing,
    relative_gap,
    solve_by_representation,
    solve_linear,
    solve_nonlinear,
)
from codebase.lab.spectral import characteristic_roots
from codebase.lab.types import Trajectory


class SolveExperiment(Experiment):
    """x on 0..horizon, cross-checked against the representation"""

    def run(self):
        kernel = self.config.kernel()
        H = self.config.forcing()
        f = self.config.nonlinearity()
        horizon = self.config.horizon

        if f.is_identity:
            x = solve_linear(kernel, H, self.config.xi, horizon)
        else:
            x = solve_nonlinear(kernel, f, H, self.config.xi, horizon)
        self.write_series("x", x)
        self.stat(kernel=kernel.isimple, nonlinearity=f.isimple, horizon=horizon)

        if isinstance(x, Trajectory) and isinstance(H, Trajectory):
            self.stat(x_end=x.values[-1])
            tol = self.config.tolerance("relative")
            if f.is_identity:
                gap = relative_gap(x, solve_by_representation(kernel, H, self.config.xi, horizon))
                self.stat(representation_gap=gap)
                self.check("representation_agrees", gap < tol)

                recovered = recover_forcing(kernel, x)
                h_gap = relative_gap(recovered, H.window(1, horizon))
                self.stat(recovery_gap=h_gap)
                self.check("forcing_recovered", h_gap < tol)
        else:
            self.stat(log_abs_x_end=float(x.to_log().log_abs[-1]))


class SpectrumExperiment(Experiment):
    """Characteristic roots, summability and multipliers over a lambda grid"""

    def run(self):
        kernel = self.config.kernel()
        report = characteristic_roots(kernel, self.config.get("lambdas", []),
                                      horizon=self.config.horizon)
        self.stat(kernel=kernel.isimple, summable=report.summable,
                  max_modulus=report.max_modulus, spectrum=report.ifull)
        self.write_series("root_modulus", [(i, abs(z)) for i, z in enumerate(report.roots)])
        for entry in report.multipliers:
            if entry.rho_gap is not None:
                self.check(f"rho_limit@{entry.lam:g}", entry.rho_gap < 1e-8)


class ClassifyExperiment(Experiment):
    """Ratio limit of H and, given a scale, the class of Lambda_a|H|"""

    def run(self):
        H = self.config.forcing()
        estimate = estimate_lambda(H.window(1, H.end), self.config.tolerance("lambda_iqr"))
        self.stat(lambda_hat=estimate.lambda_hat, lambda_iqr=estimate.iqr,
                  in_G_lambda=estimate.converged)
        if "scaling" in self.config.data:
            limsup = estimate_limsup(H.window(1, H.end), self.config.scaling(),
                                     **self.config.limsup_options())
            self.stat(limsup_H=limsup.isimple)

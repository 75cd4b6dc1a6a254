from codebase.controllers import (
    default,
    stochastic,
    verify,
)


def mode(name, handler):
    return name, handler


HANDLERS = [
    mode("solve",
         default.SolveExperiment),

    mode("spectrum",
         default.SpectrumExperiment),

    mode("classify",
         default.ClassifyExperiment),

    # Deterministic limits

    mode("verify-growth2",
         verify.Growth2Experiment),

    mode("verify-growth3",
         verify.Growth3Experiment),

    mode("verify-periodic",
         verify.PeriodicExperiment),

    mode("verify-ergodic",
         verify.ErgodicExperiment),

    mode("verify-fluct",
         verify.FluctExperiment),

    mode("verify-phi",
         verify.PhiExperiment),

    mode("verify-nonlinear",
         verify.NonlinearExperiment),

    # Random forcing

    mode("classify-tail",
         stochastic.ClassifyTailExperiment),

    mode("envelope",
         stochastic.EnvelopeExperiment),

    mode("ensemble",
         stochastic.EnsembleExperiment),
]

"""Numerical core: solvers, spectra, asymptotic checks and random forcing"""

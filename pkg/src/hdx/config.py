"""Numeric tolerances and defaults, stated once and echoed into reports."""

TOLERANCES = {
    "eigenvalue": 1e-10,          # constant-eigenvector and eigenpair checks
    "inequality_slack": 1e-9,     # slack on asserted spectral inequalities
    "jacobi_offdiagonal": 1e-12,  # Jacobi sweep termination (off-diag norm)
    "measure": 1e-12,             # measure normalization and proportionality
}

DEFAULT_SEED = 42

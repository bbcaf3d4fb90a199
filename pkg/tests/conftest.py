"""Shared fixtures.

Boundary eigenvalue solves on the fine ball grids take several seconds
each, so any geometry or eigenpair that more than one test consumes is
built exactly once per session here.
"""

import numpy as np
import pytest

from driftgeo import audits, catalog, spectral


@pytest.fixture(scope="session")
def disk65():
    return catalog.flat_disk(65)


@pytest.fixture(scope="session")
def disk65_eta(disk65):
    return spectral.eigen_boundary_weighted(disk65)


@pytest.fixture(scope="session")
def disk65_wentzell(disk65):
    """Wentzell eigenpairs on the unit disk, keyed by beta (0 = Steklov path)."""
    return {b: spectral.eigen_wentzell(disk65, b) for b in (0.0, 0.5, 1.0, 2.0)}


@pytest.fixture(scope="session")
def disk65_steklov(disk65):
    return spectral.eigen_steklov(disk65)


@pytest.fixture(scope="session")
def disk65_bounds(disk65):
    return audits.audit_eigen_bounds(disk65, mdim=2.0)


@pytest.fixture(scope="session")
def ball_eig():
    """Fine tangential resolution: boundary eigenvalues to a few 1e-4."""
    return catalog.flat_ball3(33, n_theta=181, n_phi=12)


@pytest.fixture(scope="session")
def ball_eig_steklov(ball_eig):
    return spectral.eigen_steklov(ball_eig)


@pytest.fixture(scope="session")
def ball_eig_wentzell(ball_eig):
    return {b: spectral.eigen_wentzell(ball_eig, b) for b in (0.0, 0.5, 1.0, 2.0)}


@pytest.fixture(scope="session")
def ball_audit():
    """Balanced grid for the eigenvalue-bound audits on the unit ball."""
    return catalog.flat_ball3(33, n_theta=49, n_phi=16)


@pytest.fixture(scope="session")
def ball_bounds(ball_audit):
    return audits.audit_eigen_bounds(ball_audit, mdim=3.0)


@pytest.fixture(scope="session")
def ball_quad():
    """Angular-heavy grid; boundary integrals of the sharpness audits."""
    return catalog.flat_ball3(17, n_theta=221, n_phi=16)


@pytest.fixture(scope="session")
def sphere2_49():
    return catalog.round_sphere2(49)


def first_report(reports, name):
    """Pull one audit report by name; fail loudly if the list changed."""
    for rep in reports:
        if rep.name == name:
            return rep
    raise AssertionError(f"no report named {name!r} in {[r.name for r in reports]}")


def hyp_witness(report, name):
    for h in report.hypotheses:
        if h.name == name:
            return h.witness
    raise AssertionError(f"no hypothesis {name!r} in {[h.name for h in report.hypotheses]}")


def phi_sin_fifth(env):
    return np.sin(env["x"]) / 5.0


def V_one_plus_x2(env):
    return 1.0 + env["x"] ** 2 / 4.0

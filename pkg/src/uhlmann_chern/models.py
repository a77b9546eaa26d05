"""Parameterized Hamiltonian families and their thermal states.

Four built-in models cover the geometric regimes the package targets:

* ``TwoLevelSphere``: a two-level Hamiltonian whose direction vector
  sweeps a sphere of fixed radius. Has closed-form references for every
  geometric quantity, so it anchors the numerics.
* ``Haldane``: the two-band honeycomb lattice model with complex
  next-neighbor hopping, on a momentum torus.
* ``FourBandGamma``: a four-band Dirac model built on five mutually
  anticommuting 4x4 matrices over a four-dimensional momentum torus,
  with doubly degenerate bands.
* ``CoherentOscillator``: a displaced harmonic oscillator truncated to
  a finite Fock space, parameterized by the displacement plane.

Every model exposes exact analytic coordinate derivatives of its
Hamiltonian; downstream curvature code never differentiates
eigenvectors across grid points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
import warnings

import numpy as np

from .errors import (
    ManifoldMismatch,
    TruncationTooSmall,
    TruncationWeightWarning,
    UnsupportedDirection,
)
from .linalg import (
    DEGENERACY_TOL,
    SpectralDecomposition,
    eigh_batch,
    hermitian_eig,
    unitary_exp,
)

BETA_INF = math.inf

# Pauli matrices, identity first.
SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)
PAULI = SIGMA[1:]

# Five mutually anticommuting 4x4 matrices: the first three couple the
# two sublattice blocks through Pauli matrices, the last two are block
# diagonal/off-diagonal scalars.
GAMMA = np.stack(
    [
        np.kron(SIGMA[1], SIGMA[1]),
        np.kron(SIGMA[1], SIGMA[2]),
        np.kron(SIGMA[1], SIGMA[3]),
        np.kron(SIGMA[2], SIGMA[0]),
        np.kron(SIGMA[3], SIGMA[0]),
    ]
)
for _m in (SIGMA, PAULI, GAMMA):
    _m.setflags(write=False)


@dataclass(frozen=True)
class Manifold:
    """Coordinate chart of a model's parameter space.

    cell gives the coordinate extent per direction; for tori the box is
    periodic and may cover the primitive period lattice more than once
    (multiplicity), in which case integrals are normalized by that
    cover count. orientation flips the sign of oriented integrals and
    plaquette sums; it is fixed once per model by the calibration tests.
    """

    kind: str  # "sphere", "torus", or "plane"
    dim: int
    cell: tuple[float, ...]
    origin: tuple[float, ...]
    multiplicity: int = 1
    orientation: int = 1

    @property
    def volume(self) -> float:
        return float(np.prod(self.cell))

    def scales(self) -> tuple[float, ...]:
        return self.cell


def _point(p, dim: int) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    if p.size != dim:
        raise ManifoldMismatch(f"point has {p.size} coordinates, manifold needs {dim}")
    return p


def _points(pts, dim: int) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise ManifoldMismatch(f"point batch shape {pts.shape} does not match dim {dim}")
    return pts


def _check_direction(mu: int, dim: int) -> int:
    mu = int(mu)
    if not 0 <= mu < dim:
        raise UnsupportedDirection(f"direction {mu} outside 0..{dim - 1}")
    return mu


def _sigma_dot(r):
    """Contract (..., 3) real vectors with the Pauli triple."""
    return np.einsum("...i,ijk->...jk", r, PAULI)


def _gamma_dot(r):
    """Contract (..., 5) real vectors with the anticommuting quintet."""
    return np.einsum("...i,ijk->...jk", r, GAMMA)


# ---------------------------------------------------------------------------
# Two-level sphere
# ---------------------------------------------------------------------------


def _sphere_frame(theta, phi):
    """Unit vector and its two coordinate derivatives on the sphere."""
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    rhat = np.stack([st * cp, st * sp, ct], axis=-1)
    d_theta = np.stack([ct * cp, ct * sp, -st], axis=-1)
    d_phi = np.stack([-st * sp, st * cp, np.zeros_like(st)], axis=-1)
    return rhat, d_theta, d_phi


@dataclass(frozen=True)
class TwoLevelSphere:
    """H = R * rhat(theta, phi) . sigma with fixed radius R > 0.

    Coordinates are (theta, phi). Closed-form Berry and mixed-state
    references are provided as methods; they are the primary oracles
    for the generic geometry code.
    """

    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ManifoldMismatch("radius must be positive")

    dim = 2

    @property
    def manifold(self) -> Manifold:
        return Manifold("sphere", 2, (math.pi, 2 * math.pi), (0.0, 0.0))

    @property
    def r0(self) -> float:
        """Natural energy unit: the sphere radius."""
        return self.radius

    def hamiltonian(self, p):
        return self.hamiltonian_batch(_point(p, 2)[None, :])[0]

    def gradient(self, p, mu):
        return self.gradient_batch(_point(p, 2)[None, :], mu)[0]

    def hamiltonian_batch(self, pts):
        pts = _points(pts, 2)
        rhat, _, _ = _sphere_frame(pts[:, 0], pts[:, 1])
        return self.radius * _sigma_dot(rhat)

    def gradient_batch(self, pts, mu):
        pts = _points(pts, 2)
        mu = _check_direction(mu, 2)
        _, d_theta, d_phi = _sphere_frame(pts[:, 0], pts[:, 1])
        return self.radius * _sigma_dot(d_theta if mu == 0 else d_phi)

    def boundary_twist(self, mu):
        return np.eye(2, dtype=np.complex128)

    # -- closed-form references ------------------------------------------

    def _mixing(self, beta) -> float:
        """Weight-mixing coefficient 1 - sech(beta * R), in [0, 1]."""
        x = beta * self.radius
        return 1.0 if math.isinf(x) else 1.0 - 1.0 / math.cosh(x)

    def berry_curvature_exact(self, p, band: int):
        """(theta, phi) curvature component of one pure band.

        band 0 is the lower level; its integral over the sphere divided
        by 2*pi*i is -1 ... +1 depending on orientation, and equals +1
        with the conventions used throughout this package.
        """
        theta, phi = _point(p, 2)
        rhat, dt, dp = _sphere_frame(theta, phi)
        sign = -1.0 if band == 0 else 1.0
        return sign * 0.5j * float(np.dot(rhat, np.cross(dt, dp)))

    def uhlmann_connection_exact(self, p, beta):
        """Connection components (A_theta, A_phi) of the thermal state,
        each (C/2) (rhat.sigma)(d_mu rhat.sigma) with C the mixing
        coefficient."""
        theta, phi = _point(p, 2)
        rhat, dt, dp = _sphere_frame(theta, phi)
        c = self._mixing(beta)
        rs = _sigma_dot(rhat)
        return (0.5 * c) * rs @ _sigma_dot(dt), (0.5 * c) * rs @ _sigma_dot(dp)

    def uhlmann_curvature_exact(self, p, beta):
        """(theta, phi) component of the mixed-state curvature matrix on
        the fixed-radius sphere, where the radial terms drop."""
        theta, phi = _point(p, 2)
        rhat, dt, dp = _sphere_frame(theta, phi)
        c = self._mixing(beta)
        cross = np.cross(dt, dp)
        term_two = 1j * c * _sigma_dot(cross)
        term_three = -0.5j * c * c * float(np.dot(rhat, cross)) * _sigma_dot(rhat)
        return term_two + term_three

    def thermal_trace_exact(self, p, beta):
        """(theta, phi) component of the thermally weighted curvature
        trace: -(i/2) tanh(beta R)^3 times the solid-angle density."""
        theta, phi = _point(p, 2)
        rhat, dt, dp = _sphere_frame(theta, phi)
        t = math.tanh(beta * self.radius) if not math.isinf(beta) else 1.0
        return -0.5j * t**3 * float(np.dot(rhat, np.cross(dt, dp)))


# ---------------------------------------------------------------------------
# Haldane honeycomb model
# ---------------------------------------------------------------------------

_SQ3 = math.sqrt(3.0)
# Nearest-neighbor bond vectors and the next-neighbor (Bravais) vectors
# they generate. The Bravais lattice fixes the momentum periodicity.
_HALDANE_A = np.array([[_SQ3, 0.0], [-_SQ3 / 2, -1.5], [-_SQ3 / 2, 1.5]])
_HALDANE_B = np.array(
    [
        _HALDANE_A[1] - _HALDANE_A[2],
        _HALDANE_A[0] - _HALDANE_A[1],
        _HALDANE_A[2] - _HALDANE_A[0],
    ]
)
_HALDANE_A.setflags(write=False)
_HALDANE_B.setflags(write=False)

# Smallest axis-aligned periodic box of the momentum lattice: x period
# 4*pi/(3*sqrt(3)), y period 4*pi/3. It covers the primitive reciprocal
# cell exactly twice, so oriented integrals carry multiplicity 2.
_HALDANE_CELL = (4 * math.pi / (3 * _SQ3), 4 * math.pi / 3)


@dataclass(frozen=True)
class Haldane:
    """Two-band honeycomb model with staggered mass and complex
    next-neighbor hopping.

    The direction vector is R1 = t1 * sum cos(k.a_i), R2 = t1 * sum
    sin(k.a_i), R3 = M - 2 t2 sin(phi) * sum sin(k.b_i) over the bond
    sets above. The Hamiltonian is periodic under the momentum lattice
    only up to a constant diagonal unitary along x, which the plaquette
    routines apply as a boundary twist.
    """

    t1: float
    t2: float
    phi: float
    M: float

    def __post_init__(self):
        if self.t1 == 0:
            raise ManifoldMismatch("t1 must be nonzero")

    dim = 2

    @property
    def manifold(self) -> Manifold:
        # Chart orientation fixed by calibration so the lower band in
        # the gapped phase |M| < 3 sqrt(3) t2 |sin phi| carries first
        # Chern number +1 (with phi = +pi/2).
        return Manifold("torus", 2, _HALDANE_CELL, (0.0, 0.0), multiplicity=2, orientation=-1)

    @property
    def r0(self) -> float:
        """Energy unit: the gap at zero momentum and zero mass, 6 |t1|."""
        return 6.0 * abs(self.t1)

    def r_vector_batch(self, pts):
        pts = _points(pts, 2)
        ka = pts @ _HALDANE_A.T
        kb = pts @ _HALDANE_B.T
        r1 = self.t1 * np.cos(ka).sum(axis=1)
        r2 = self.t1 * np.sin(ka).sum(axis=1)
        r3 = self.M - 2 * self.t2 * math.sin(self.phi) * np.sin(kb).sum(axis=1)
        return np.stack([r1, r2, r3], axis=-1)

    def r_gradient_batch(self, pts, mu):
        pts = _points(pts, 2)
        mu = _check_direction(mu, 2)
        ka = pts @ _HALDANE_A.T
        kb = pts @ _HALDANE_B.T
        da = _HALDANE_A[:, mu]
        db = _HALDANE_B[:, mu]
        d1 = -self.t1 * (np.sin(ka) * da).sum(axis=1)
        d2 = self.t1 * (np.cos(ka) * da).sum(axis=1)
        d3 = -2 * self.t2 * math.sin(self.phi) * (np.cos(kb) * db).sum(axis=1)
        return np.stack([d1, d2, d3], axis=-1)

    def hamiltonian(self, p):
        return self.hamiltonian_batch(_point(p, 2)[None, :])[0]

    def gradient(self, p, mu):
        return self.gradient_batch(_point(p, 2)[None, :], mu)[0]

    def hamiltonian_batch(self, pts):
        return _sigma_dot(self.r_vector_batch(pts))

    def gradient_batch(self, pts, mu):
        return _sigma_dot(self.r_gradient_batch(pts, mu))

    def gap(self, p):
        """Direct gap 2 |R(k)|, equal to the band splitting."""
        return float(self.gap_batch(_point(p, 2)[None, :])[0])

    def gap_batch(self, pts):
        r = self.r_vector_batch(pts)
        return 2.0 * np.sqrt((r * r).sum(axis=-1))

    def boundary_twist(self, mu):
        """Constant unitary W with H(k + cell_mu) = W H(k) W^dagger."""
        mu = _check_direction(mu, 2)
        if mu == 0:
            return np.diag([np.exp(2j * math.pi / 3), 1.0]).astype(np.complex128)
        return np.eye(2, dtype=np.complex128)


# ---------------------------------------------------------------------------
# Four-band Dirac model on a 4-torus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FourBandGamma:
    """H = sum_i R_i(k) Gamma_i with R = (cos 2k_x, cos 2k_y, cos 2k_z,
    cos 2k_w, m + sum_i sin 2k_i).

    Both bands +|R| and -|R| are doubly degenerate everywhere. The
    momentum cell is [0, pi)^4 with unit cover multiplicity.
    """

    m: float

    dim = 4

    @property
    def manifold(self) -> Manifold:
        # Orientation fixed by calibration so the 0 < m < 2 phase
        # carries ground-doublet second Chern number +3.
        return Manifold("torus", 4, (math.pi,) * 4, (0.0,) * 4, orientation=-1)

    @property
    def r0(self) -> float:
        """Energy unit: |R| at k_i = pi/4 with reference mass -3,
        which evaluates to exactly 1."""
        return 1.0

    def r_vector_batch(self, pts):
        pts = _points(pts, 4)
        two_k = 2.0 * pts
        cos = np.cos(two_k)
        sin = np.sin(two_k)
        r5 = self.m + sin.sum(axis=1)
        return np.concatenate([cos, r5[:, None]], axis=1)

    def r_gradient_batch(self, pts, mu):
        pts = _points(pts, 4)
        mu = _check_direction(mu, 4)
        out = np.zeros((pts.shape[0], 5))
        out[:, mu] = -2.0 * np.sin(2.0 * pts[:, mu])
        out[:, 4] = 2.0 * np.cos(2.0 * pts[:, mu])
        return out

    def hamiltonian(self, p):
        return self.hamiltonian_batch(_point(p, 4)[None, :])[0]

    def gradient(self, p, mu):
        return self.gradient_batch(_point(p, 4)[None, :], mu)[0]

    def hamiltonian_batch(self, pts):
        return _gamma_dot(self.r_vector_batch(pts))

    def gradient_batch(self, pts, mu):
        return _gamma_dot(self.r_gradient_batch(pts, mu))

    def gap_batch(self, pts):
        r = self.r_vector_batch(pts)
        return 2.0 * np.sqrt((r * r).sum(axis=-1))

    def boundary_twist(self, mu):
        _check_direction(mu, 4)
        return np.eye(4, dtype=np.complex128)


def gamma_anticommutation_residual() -> float:
    """Largest deviation of {Gamma_i, Gamma_j} from 2 delta_ij times the
    identity, over all 15 distinct pairs plus the 5 squares. Reads the
    module-level constants so a corrupted table is caught at run time.
    """
    res = 0.0
    eye2 = 2.0 * np.eye(4)
    for i in range(5):
        for j in range(i, 5):
            anti = GAMMA[i] @ GAMMA[j] + GAMMA[j] @ GAMMA[i]
            target = eye2 if i == j else 0.0
            res = max(res, float(np.abs(anti - target).max()))
    return res


# ---------------------------------------------------------------------------
# Displaced truncated oscillator
# ---------------------------------------------------------------------------


def _phase_divided_difference(w):
    """Divided differences of exp(-i x) on the spectrum w (..., N):
    Phi_jk = (exp(-i w_j) - exp(-i w_k)) / (-i (w_j - w_k)), evaluated
    stably through a half-angle sinc so coincident pairs are exact.
    """
    avg = 0.5 * (w[..., :, None] + w[..., None, :])
    diff = w[..., :, None] - w[..., None, :]
    return np.exp(-1j * avg) * np.sinc(diff / (2.0 * math.pi))


@dataclass(frozen=True)
class CoherentOscillator:
    """Harmonic oscillator displaced in phase space, truncated to
    fock_dim levels.

    Parameter points are (x, y) with z = x + i y. The Hamiltonian is
    D(z) H0 D(z)^dagger where H0 = hbar_omega * (n + 1/2) and D is the
    exact matrix exponential of the truncated generator, so the family
    is exactly unitary even at the truncation edge. Displacements are
    restricted to |z|^2 <= fock_dim / 8 to keep the edge irrelevant.
    """

    hbar_omega: float = 1.0
    fock_dim: int = 40

    def __post_init__(self):
        if self.fock_dim < 8:
            raise ManifoldMismatch("fock_dim must be at least 8")
        if self.fock_dim > 128:
            raise ManifoldMismatch("fock_dim above 128 is not supported")
        if not self.hbar_omega > 0:
            raise ManifoldMismatch("hbar_omega must be positive")

    dim = 2

    @property
    def manifold(self) -> Manifold:
        half = math.sqrt(self.fock_dim / 8.0) / math.sqrt(2.0)
        return Manifold("plane", 2, (2 * half, 2 * half), (-half, -half))

    @property
    def r0(self) -> float:
        """Energy unit: the level spacing."""
        return self.hbar_omega

    @cached_property
    def _lowering(self) -> np.ndarray:
        a = np.zeros((self.fock_dim, self.fock_dim), dtype=np.complex128)
        n = np.arange(1, self.fock_dim)
        a[n - 1, n] = np.sqrt(n)
        a.setflags(write=False)
        return a

    @cached_property
    def _h0_diag(self) -> np.ndarray:
        d = self.hbar_omega * (np.arange(self.fock_dim) + 0.5)
        d.setflags(write=False)
        return d

    def _check_displacement(self, z):
        mag = np.abs(np.asarray(z)) ** 2
        if np.any(mag > self.fock_dim / 8.0):
            raise TruncationTooSmall(
                f"|z|^2 = {float(np.max(mag)):.3f} exceeds fock_dim/8 = "
                f"{self.fock_dim / 8.0:.3f}"
            )

    def displacement(self, z) -> np.ndarray:
        """Truncated displacement unitary exp(z a^dagger - conj(z) a)."""
        z = complex(z)
        self._check_displacement(z)
        gen = z * self._lowering.conj().T - np.conj(z) * self._lowering
        return unitary_exp(gen)

    def _displacement_frame(self, pts):
        """Eigenframe of the generator for a batch of points: returns
        (w, V, D) with generator = V diag(-i w) V^dagger and D = exp."""
        z = pts[:, 0] + 1j * pts[:, 1]
        self._check_displacement(z)
        adag = self._lowering.conj().T
        gen = z[:, None, None] * adag - z.conj()[:, None, None] * self._lowering
        w, v = eigh_batch(1j * gen)
        d = np.einsum("bij,bj,bkj->bik", v, np.exp(-1j * w), v.conj())
        return w, v, d

    def hamiltonian(self, p):
        return self.hamiltonian_batch(_point(p, 2)[None, :])[0]

    def gradient(self, p, mu):
        return self.gradient_batch(_point(p, 2)[None, :], mu)[0]

    def hamiltonian_batch(self, pts):
        pts = _points(pts, 2)
        _, _, d = self._displacement_frame(pts)
        return np.einsum("bij,j,bkj->bik", d, self._h0_diag, d.conj())

    def gradient_batch(self, pts, mu):
        pts = _points(pts, 2)
        mu = _check_direction(mu, 2)
        adag = self._lowering.conj().T
        # d(generator)/dx = a^dagger - a, d(generator)/dy = i (a^dagger + a)
        dgen = (adag - self._lowering) if mu == 0 else 1j * (adag + self._lowering)
        w, v, d = self._displacement_frame(pts)
        g = np.einsum("bji,jk,bkl->bil", v.conj(), dgen, v)
        phi = _phase_divided_difference(w)
        dd = np.einsum("bij,bjk,blk->bil", v, g * phi, v.conj())
        k = np.einsum("bij,j,bkj->bik", dd, self._h0_diag, d.conj())
        return k + k.conj().transpose(0, 2, 1)

    def boundary_twist(self, mu):
        return np.eye(self.fock_dim, dtype=np.complex128)

    def _check_thermal_truncation(self, weights):
        tail = weights[self.fock_dim // 2 :]
        if tail.size and float(tail.max()) >= 1e-12:
            warnings.warn(
                "thermal weight has not decayed below 1e-12 by half the Fock "
                "truncation; raise fock_dim or beta",
                TruncationWeightWarning,
                stacklevel=3,
            )

    def uhlmann_mixing_exact(self, beta, n, m) -> float:
        """Closed-form weight-mixing coefficient between oscillator
        levels n and m of the undisplaced thermal state."""
        if math.isinf(beta):
            return 0.0 if n == m == 0 else 1.0
        en = math.exp(-beta * self.hbar_omega * n)
        em = math.exp(-beta * self.hbar_omega * m)
        num = (math.sqrt(en) - math.sqrt(em)) ** 2
        den = en + em
        return num / den


MODEL_VARIANTS = {
    "two_level_sphere": TwoLevelSphere,
    "haldane": Haldane,
    "four_band_gamma": FourBandGamma,
    "coherent_oscillator": CoherentOscillator,
}


def model_id(model) -> str:
    """Stable human-readable identifier for reports and CSV headers."""
    return repr(model)


# ---------------------------------------------------------------------------
# Thermal states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThermalState:
    """Gibbs state of a model Hamiltonian at one parameter point.

    weights holds the density-matrix eigenvalues ordered by ascending
    energy (so they are non-increasing for beta > 0). beta may be the
    symbolic value BETA_INF, in which case the ground cluster carries
    exact weight 1/D each and every other level carries exactly 0.
    """

    beta: float
    rho: np.ndarray
    spectrum: SpectralDecomposition
    weights: np.ndarray

    def __post_init__(self):
        self.rho.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.weights.size

    @property
    def ground(self) -> tuple[int, ...]:
        return self.spectrum.groups[0]


def thermal_weights(energies: np.ndarray, beta: float, groups=None) -> np.ndarray:
    """Normalized Gibbs weights for ascending energies.

    At beta = 0 the weights are exactly uniform; at BETA_INF the ground
    cluster (first entry of groups) carries 1/D each.
    """
    energies = np.asarray(energies, dtype=np.float64)
    if math.isinf(beta):
        if groups is None:
            raise ValueError("BETA_INF weights need the degeneracy groups")
        w = np.zeros_like(energies)
        ground = list(groups[0])
        w[ground] = 1.0 / len(ground)
        return w
    x = np.exp(-beta * (energies - energies.min()))
    return x / x.sum()


def thermal_state(model, p, beta: float, degeneracy_tol: float = DEGENERACY_TOL) -> ThermalState:
    """Gibbs state exp(-beta H(p)) / Z, built from the spectral
    decomposition of the model Hamiltonian.

    Parameters
    ----------
    model : one of the model classes above
    p : parameter point on the model's manifold
    beta : inverse temperature, 0 <= beta <= BETA_INF
    degeneracy_tol : relative tolerance for eigenvalue clustering
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    sd = hermitian_eig(model.hamiltonian(p), degeneracy_tol=degeneracy_tol)
    w = thermal_weights(sd.eigenvalues, beta, sd.groups)
    check = getattr(model, "_check_thermal_truncation", None)
    if check is not None and not math.isinf(beta):
        check(w)
    v = sd.eigenvectors
    rho = (v * w) @ v.conj().T
    return ThermalState(beta, rho, sd, w)


# Thin functional wrappers matching the operation-style surface.


def hamiltonian(model, p):
    return model.hamiltonian(p)


def hamiltonian_gradient(model, p, mu):
    return model.gradient(p, mu)


def coherent_displacement(model, z):
    return model.displacement(z)

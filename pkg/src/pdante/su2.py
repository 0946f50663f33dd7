"""Spin-1/2 algebra on plain 2x2 complex numpy arrays.

Spin operators are I = sigma/2. Bloch components use the normalisation
``v_a = 2 Tr[rho I_a]`` so that equilibrium is (0, 0, 1) and a full
on-resonance pi/2 x-pulse gives ``-<I_Y> = 1``.

Every propagator produced by this package has determinant 1 and is handled
in Cayley-Klein form ``U = [[a, -conj(b)], [b, conj(a)]]`` wherever a whole
offset grid is evaluated at once; ``ck_to_matrix`` and ``matrix_to_ck`` move
between the two forms.
"""

import numpy as np

IDENTITY = np.eye(2, dtype=complex)
IX = np.array([[0, 1], [1, 0]], dtype=complex) / 2
IY = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
IZ = np.array([[1, 0], [0, -1]], dtype=complex) / 2
IPLUS = IX + 1j * IY
IMINUS = IX - 1j * IY

for _op in (IDENTITY, IX, IY, IZ, IPLUS, IMINUS):
    _op.flags.writeable = False

HERMITIAN_TOL = 1e-9
UNITARY_TOL = 1e-9


def hermitian(hx=0.0, hy=0.0, hz=0.0, h0=0.0):
    """``h0*1 + hx*Ix + hy*Iy + hz*Iz``."""
    return h0 * IDENTITY + hx * IX + hy * IY + hz * IZ


def components(h):
    """Inverse of :func:`hermitian`: returns ``(h0, hx, hy, hz)``."""
    h = np.asarray(h)
    return (
        float(np.real(np.trace(h))) / 2,
        2 * float(np.real(np.trace(h @ IX))),
        2 * float(np.real(np.trace(h @ IY))),
        2 * float(np.real(np.trace(h @ IZ))),
    )


def is_hermitian(h, tol=HERMITIAN_TOL):
    h = np.asarray(h)
    scale = max(np.linalg.norm(h), 1.0)
    return np.linalg.norm(h - h.conj().T) <= tol * scale


def is_unitary(u, tol=UNITARY_TOL):
    u = np.asarray(u)
    return np.linalg.norm(u.conj().T @ u - IDENTITY) <= tol


def expm_h(h, t):
    """Closed-form ``exp(-i H t)`` for a Hermitian 2x2 ``H``.

    Writing ``H = h0*1 + h.I`` with ``|h| = Omega``::

        exp(-iHt) = exp(-i h0 t) [cos(Omega t/2) 1 - i (2 sin(Omega t/2)/Omega) h.I]
    """
    if t < 0:
        raise ValueError(f"duration must be non-negative, got {t}")
    h = np.asarray(h, dtype=complex)
    if h.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {h.shape}")
    if not is_hermitian(h):
        raise ValueError("matrix is not Hermitian")
    h0, hx, hy, hz = components(h)
    return np.exp(-1j * h0 * t) * rotation(hx * t, hy * t, hz * t)


def rotation(rx, ry, rz):
    """``exp(-i (rx Ix + ry Iy + rz Iz))``: rotation by |r| about r."""
    angle = np.sqrt(rx * rx + ry * ry + rz * rz)
    c = np.cos(angle / 2)
    # sin(angle/2)/angle without the 0/0
    s = 0.5 * np.sinc(angle / (2 * np.pi))
    return c * IDENTITY - 2j * s * (rx * IX + ry * IY + rz * IZ)


def rx(angle):
    return rotation(angle, 0.0, 0.0)


def ry(angle):
    return rotation(0.0, angle, 0.0)


def rz(angle):
    return rotation(0.0, 0.0, angle)


def frobenius_distance(a, b):
    """``sqrt(Tr[(A-B)^dagger (A-B)])``."""
    d = np.asarray(a) - np.asarray(b)
    return float(np.sqrt(np.real(np.sum(d.conj() * d))))


def phase_aligned_distance(a, b):
    """Frobenius distance after removing the best global phase between A and B.

    Diagnostic only; the validity maps use the raw distance.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    overlap = np.trace(b.conj().T @ a)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return frobenius_distance(a, phase * b)


def density(v):
    """Spin-1/2 density matrix for Bloch vector ``v``."""
    x, y, z = v
    return 0.5 * IDENTITY + x * IX + y * IY + z * IZ


def bloch_evolve(u, v):
    """Bloch vector after ``rho -> U rho U^dagger``."""
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise ValueError("propagator is not unitary")
    rho = u @ density(v) @ u.conj().T
    return np.array([2 * np.real(np.trace(rho @ op)) for op in (IX, IY, IZ)])


# -- Cayley-Klein (grid) form -------------------------------------------------


def ck_to_matrix(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    out = np.empty(a.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = a
    out[..., 0, 1] = -np.conj(b)
    out[..., 1, 0] = b
    out[..., 1, 1] = np.conj(a)
    return out


def matrix_to_ck(u):
    u = np.asarray(u)
    return u[..., 0, 0], u[..., 1, 0]


def ck_multiply(first, second):
    """Cayley-Klein pair of ``U1 @ U2``."""
    a1, b1 = first
    a2, b2 = second
    return a1 * a2 - np.conj(b1) * b2, b1 * a2 + np.conj(a1) * b2


def ck_distance(first, second):
    """Frobenius distance between two Cayley-Klein propagators."""
    da = first[0] - second[0]
    db = first[1] - second[1]
    return np.sqrt(2.0 * (np.abs(da) ** 2 + np.abs(db) ** 2))


def ck_rotation(hx, hy, hz, t):
    """Cayley-Klein pair of ``exp(-i t (hx Ix + hy Iy + hz Iz))``, vectorised."""
    hx, hy, hz = np.broadcast_arrays(hx, hy, hz)
    h = np.sqrt(hx * hx + hy * hy + hz * hz)
    c = np.cos(0.5 * h * t)
    s = 0.5 * t * np.sinc(h * t / (2 * np.pi))  # sin(h t/2) / h
    return c - 1j * s * hz, -1j * s * (hx + 1j * hy)


def ck_bloch_from_z(a, b):
    """Bloch vector ``(x, y, z)`` reached from (0, 0, 1) under ``(a, b)``."""
    ab = np.conj(a) * b
    return 2 * np.real(ab), 2 * np.imag(ab), np.abs(a) ** 2 - np.abs(b) ** 2

"""Dynamical elliptic r-matrix on C^2 (x) C^2 and its defining identities.

Basis order for the tensor square is (e1*e1, e1*e2, e2*e1, e2*e2).  With
the sl2 triple H = diag(1,-1), E = upper, F = lower, the r-matrix reads

    r(w, lambda) = (g0(w)/2) H*H + g_{-lambda}(w) E*F + g_lambda(w) F*E,
    w = u - v,

i.e. diagonal (1,-1,-1,1)*g0(w)/2 with the two dynamical kernels in the
middle anti-diagonal block.  Everything lives in the weight-zero block,
so [H*1 + 1*H, r] = 0 holds exactly by sparsity.

The matrix satisfies the classical dynamical Yang-Baxter equation on
C^2 (x) C^2 (x) C^2:

    [r12,r13] + [r12,r23] + [r13,r23]
        = H_1 d/dlam r23 - H_2 d/dlam r13 + H_3 d/dlam r12,

and the half-current exchange relations at central charge zero are a
regrouping of the same identity with L-operators realized as r-matrix
slices: the third tensor slot carries the evaluation point w, and

    L^+(u) = r embedded in slots (1,3) at argument u - w,
    L^-(u) = -r embedded in slots (3,1) at argument w - u.

cybe_residual checks the non-dynamical classical Yang-Baxter equation
for the degenerate (rational / trigonometric) matrices; those kernels
live in the degenerations module and are imported lazily to keep the
module graph acyclic.
"""

import numpy as np

from .kernels import dlambda_g_lambda, g0, g_lambda

H = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
E = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
F = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
I2 = np.eye(2, dtype=complex)

HH = np.kron(H, H)
EF = np.kron(E, F)
FE = np.kron(F, E)

# entries allowed by weight-zero sparsity: the diagonal and the middle
# anti-diagonal pair (2,3)/(3,2) in 1-based numbering
WEIGHT_ZERO_MASK = np.zeros((4, 4), dtype=bool)
WEIGHT_ZERO_MASK[np.arange(4), np.arange(4)] = True
WEIGHT_ZERO_MASK[1, 2] = WEIGHT_ZERO_MASK[2, 1] = True


def build_r(u, v, lam, p):
    """The 4x4 dynamical r-matrix at w = u - v.

    Diagonal (g0/2, -g0/2, -g0/2, g0/2); entry (2,3) = g_{-lambda}(w);
    entry (3,2) = g_lambda(w).  Pole rejection is inherited from the
    kernel evaluations (w and +-lambda must stay off the lattice).
    """
    w = complex(u) - complex(v)
    return (
        0.5 * g0(w, p) * HH
        + g_lambda(w, -complex(lam), p) * EF
        + g_lambda(w, complex(lam), p) * FE
    )


def dlambda_r(u, v, lam, p):
    """lambda-derivative of build_r; the diagonal does not move."""
    w = complex(u) - complex(v)
    lam = complex(lam)
    return -dlambda_g_lambda(w, -lam, p) * EF + dlambda_g_lambda(w, lam, p) * FE


def weight_zero_defect(mat4):
    """Largest |entry| outside the weight-zero sparsity pattern (exact 0)."""
    return float(np.max(np.abs(np.asarray(mat4)[~WEIGHT_ZERO_MASK])))


def hh_commutator_defect(mat4):
    """max |[H*1 + 1*H, mat4]|; zero exactly for weight-zero matrices."""
    cart = np.kron(H, I2) + np.kron(I2, H)
    return float(np.max(np.abs(cart @ mat4 - mat4 @ cart)))


_ROWS = "abc"
_COLS = "def"


def _embed2(mat4, i, j):
    """Embed a two-site 4x4 operator into slots (i, j) of three sites.

    The remaining slot carries the identity; slots are 0-based and the
    pair may come in either order, which is how the slot-transposed
    L^- slices are built.
    """
    if i == j or not {i, j} <= {0, 1, 2}:
        raise ValueError(f"slots must be two distinct members of 0,1,2, got ({i}, {j})")
    k = ({0, 1, 2} - {i, j}).pop()
    spec = (
        f"{_ROWS[i]}{_ROWS[j]}{_COLS[i]}{_COLS[j]},{_ROWS[k]}{_COLS[k]}->abcdef"
    )
    t = np.asarray(mat4, dtype=complex).reshape(2, 2, 2, 2)
    return np.einsum(spec, t, I2).reshape(8, 8)


def _embed1(mat2, i):
    """Embed a one-site 2x2 operator into slot i of three sites."""
    mats = [I2, I2, I2]
    mats[i] = np.asarray(mat2, dtype=complex)
    return np.kron(np.kron(mats[0], mats[1]), mats[2])


H1, H2, H3 = (_embed1(H, i) for i in range(3))


def _comm(a, b):
    return a @ b - b @ a


def cdybe_residual(u1, u2, u3, lam, p, dynamical_mask=(True, True, True)):
    """Relative residual of the classical dynamical Yang-Baxter equation.

    Builds r_ij = r(u_i - u_j) in slots (i, j) of the 8x8 triple tensor
    space and returns

        || [r12,r13]+[r12,r23]+[r13,r23]
           - (H1 d_lam r23 - H2 d_lam r13 + H3 d_lam r12) ||_F
        / max(1, ||bracket sum||_F).

    dynamical_mask switches the three derivative terms individually;
    with any of them dropped the identity fails by a large margin, which
    is used as a sensitivity guard on the test side.
    """
    r12 = _embed2(build_r(u1, u2, lam, p), 0, 1)
    r13 = _embed2(build_r(u1, u3, lam, p), 0, 2)
    r23 = _embed2(build_r(u2, u3, lam, p), 1, 2)
    lhs = _comm(r12, r13) + _comm(r12, r23) + _comm(r13, r23)
    rhs = np.zeros_like(lhs)
    if dynamical_mask[0]:
        rhs += H1 @ _embed2(dlambda_r(u2, u3, lam, p), 1, 2)
    if dynamical_mask[1]:
        rhs -= H2 @ _embed2(dlambda_r(u1, u3, lam, p), 0, 2)
    if dynamical_mask[2]:
        rhs += H3 @ _embed2(dlambda_r(u1, u2, lam, p), 0, 1)
    scale = max(1.0, np.linalg.norm(lhs))
    return float(np.linalg.norm(lhs - rhs) / scale)


def rll_residual(u, v, w, lam, signs, p):
    """Relative residual of the half-current exchange relations at c = 0.

    signs is a pair drawn from '+'/'-' choosing the two L-slices, e.g.
    ("+", "-").  The relation checked is

        [L1, L2] = [L1 + L2, r12(u - v)]
                   + H1 d_lam L2 - H2 d_lam L1 + H3 d_lam r12(u - v),

    with L1 the slice at u (slots 1&3), L2 the slice at v (slots 2&3),
    and the evaluation point w in the third slot.  All four sign pairs
    must vanish: the central terms that would distinguish them are
    killed by the evaluation representation.
    """
    if len(signs) != 2:
        raise ValueError(f"signs must be a pair, got {signs!r}")

    def slice_at(sign, slot, point):
        if sign == "+":
            mat = _embed2(build_r(point, w, lam, p), slot, 2)
            dmat = _embed2(dlambda_r(point, w, lam, p), slot, 2)
            return mat, dmat
        if sign == "-":
            mat = -_embed2(build_r(w, point, lam, p), 2, slot)
            dmat = -_embed2(dlambda_r(w, point, lam, p), 2, slot)
            return mat, dmat
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")

    l1, dl1 = slice_at(signs[0], 0, u)
    l2, dl2 = slice_at(signs[1], 1, v)
    r12 = _embed2(build_r(u, v, lam, p), 0, 1)
    dr12 = _embed2(dlambda_r(u, v, lam, p), 0, 1)
    lhs = _comm(l1, l2)
    rhs = _comm(l1 + l2, r12) + H1 @ dl2 - H2 @ dl1 + H3 @ dr12
    scale = max(1.0, np.linalg.norm(lhs))
    return float(np.linalg.norm(lhs - rhs) / scale)


def cybe_residual(kind, u1, u2, u3, mu=None, eta=None):
    """Relative residual of the non-dynamical CYBE for a degenerate kind.

    kind is one of the build_degenerate_r kinds ("a_k0", "b_k0",
    "a_cyl", "b_cyl", "c_cyl"); the sample (u1, u2, u3) must be ordered
    so that every difference u_i - u_j, i < j, lies in the kind's
    validity region (decreasing modulus for the annulus kinds, strictly
    increasing imaginary part for the cylinder kinds).
    """
    from .degenerations import build_degenerate_r

    r12 = _embed2(build_degenerate_r(kind, u1, u2, mu=mu, eta=eta), 0, 1)
    r13 = _embed2(build_degenerate_r(kind, u1, u3, mu=mu, eta=eta), 0, 2)
    r23 = _embed2(build_degenerate_r(kind, u2, u3, mu=mu, eta=eta), 1, 2)
    b1, b2, b3 = _comm(r12, r13), _comm(r12, r23), _comm(r13, r23)
    scale = max(1.0, np.linalg.norm(b1) + np.linalg.norm(b2) + np.linalg.norm(b3))
    return float(np.linalg.norm(b1 + b2 + b3) / scale)

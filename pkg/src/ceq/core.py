"""Problem instances, witnesses, verification, and input normalization.

A PCE/SPCE/LCE instance is a pair of equal-shape generator matrices; a
witness is an invertible change of basis S together with a monomial
action M, and it verifies when S * G * M = H entrywise and the diagonal
of M lies in the class the problem tag allows.

`preprocess` normalizes PCE inputs ahead of the gadget reduction: it
strips zero columns, replaces both matrices by the non-zero rows of
their RREF (full row rank), and rejects early when a cheap invariant
already refutes equivalence (zero-column counts, ranks, or column
multiplicity profiles differing). The returned journal carries enough
to map witnesses across the normalization in both directions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

from .errors import DimMismatch, FieldMismatch, WitnessInvalid
from .field import Field
from .matrix import (
    Mat,
    Mono,
    Perm,
    column_multiplicity_profile,
    strip_zero_columns,
)


class Tag(enum.Enum):
    PCE = "PCE"
    SPCE = "SPCE"
    LCE = "LCE"


class RejectReason(enum.Enum):
    ZERO_COLUMN_COUNT_MISMATCH = "ZeroColumnCountMismatch"
    RANK_MISMATCH = "RankMismatch"
    PROFILE_MISMATCH = "ProfileMismatch"


@dataclass(frozen=True)
class Instance:
    """A pair (G, H) of k x n generator matrices plus the problem tag."""

    field: Field
    G: Mat
    H: Mat
    tag: Tag

    def __post_init__(self):
        if self.G.field != self.field or self.H.field != self.field:
            raise FieldMismatch("matrices must live in the instance field")
        if (self.G.k, self.G.n) != (self.H.k, self.H.n):
            raise DimMismatch(
                f"G is {self.G.k}x{self.G.n} but H is {self.H.k}x{self.H.n}"
            )

    @property
    def k(self) -> int:
        return self.G.k

    @property
    def n(self) -> int:
        return self.G.n


@dataclass(frozen=True)
class Witness:
    """(S, M) with S a k x k change of basis and M a monomial action."""

    S: Mat
    M: Mono


def diag_allowed(fld: Field, tag: Tag, diag) -> bool:
    if tag is Tag.PCE:
        return all(d == 1 for d in diag)
    if tag is Tag.SPCE:
        return all(fld.is_sign(d) for d in diag)
    return all(d != 0 for d in diag)


def verify_witness(inst: Instance, w: Witness) -> bool:
    """Exact check: S invertible, diagonal in the tag's class, S*G*M = H."""
    if w.S.field != inst.field or w.M.field != inst.field:
        raise FieldMismatch("witness field differs from instance field")
    if w.S.k != inst.k or w.S.n != inst.k:
        raise DimMismatch(f"S must be {inst.k}x{inst.k}, got {w.S.k}x{w.S.n}")
    if w.M.n != inst.n:
        raise DimMismatch(f"M must act on {inst.n} columns, got {w.M.n}")
    if not diag_allowed(inst.field, inst.tag, w.M.diag):
        return False
    if not w.S.is_invertible():
        return False
    return w.S.mul(inst.G).apply_mono(w.M) == inst.H


# ---------------------------------------------------------------------------
# preprocessing


@dataclass(frozen=True)
class Journal:
    """Record of one normalization run, enough to move witnesses across it.

    removed_g / removed_h are the dropped zero-column indices (0-based,
    ascending); u_g / u_h are invertible k x k transforms with
    u_g * stripped(G) = rref(stripped(G)), same for H; rank is the common
    row rank. The normalized generators are the first `rank` rows of
    those RREFs.
    """

    original: Instance
    normalized: Instance
    removed_g: tuple[int, ...]
    removed_h: tuple[int, ...]
    rank: int
    u_g: Mat
    u_h: Mat

    @property
    def trivial(self) -> bool:
        return (
            not self.removed_g
            and not self.removed_h
            and self.rank == self.original.k
            and self.original == self.normalized
        )


@dataclass(frozen=True)
class Rejection:
    reason: RejectReason


@dataclass(frozen=True)
class Normalized:
    instance: Instance
    journal: Journal


PreprocessOutcome = Union[Rejection, Normalized]


def _identity_journal(inst: Instance) -> Journal:
    u = Mat.identity(inst.field, inst.k)
    return Journal(inst, inst, (), (), inst.k, u, u)


def preprocess(inst: Instance) -> PreprocessOutcome:
    """Normalize a PCE instance or reject it on a cheap refuting invariant.

    Non-PCE instances pass through untouched with a trivial journal.
    Rejection is a value, not an error.
    """
    if inst.tag is not Tag.PCE:
        return Normalized(inst, _identity_journal(inst))
    g_stripped, removed_g = strip_zero_columns(inst.G)
    h_stripped, removed_h = strip_zero_columns(inst.H)
    if len(removed_g) != len(removed_h):
        return Rejection(RejectReason.ZERO_COLUMN_COUNT_MISMATCH)
    rg, rank_g, _, u_g = g_stripped.rref_with_transform()
    rh, rank_h, _, u_h = h_stripped.rref_with_transform()
    if rank_g != rank_h:
        return Rejection(RejectReason.RANK_MISMATCH)
    g_norm = Mat(inst.field, rg.rows[:rank_g], g_stripped.n)
    h_norm = Mat(inst.field, rh.rows[:rank_h], h_stripped.n)
    if column_multiplicity_profile(g_norm) != column_multiplicity_profile(h_norm):
        return Rejection(RejectReason.PROFILE_MISMATCH)
    norm_inst = Instance(inst.field, g_norm, h_norm, Tag.PCE)
    journal = Journal(inst, norm_inst, removed_g, removed_h, rank_g, u_g, u_h)
    return Normalized(norm_inst, journal)


# ---------------------------------------------------------------------------
# witness transport across the normalization


def _kept(n: int, removed: tuple[int, ...]) -> list[int]:
    dropped = set(removed)
    return [j for j in range(n) if j not in dropped]


def map_witness_to_normalized(journal: Journal, w: Witness) -> Witness:
    """Turn a witness for the original instance into one for the normalized
    instance (forward through zero-column stripping and rank reduction)."""
    orig = journal.original
    if not verify_witness(orig, w):
        raise WitnessInvalid("witness does not verify on the original instance")
    if journal.trivial:
        return w
    fld = journal.original.field
    kept_g = _kept(orig.n, journal.removed_g)
    kept_h = _kept(orig.n, journal.removed_h)
    pos_in_g = {j: t for t, j in enumerate(kept_g)}
    sigma = w.M.perm.sigma
    sigma_s = []
    for j in kept_h:
        src = sigma[j]
        if src not in pos_in_g:
            raise WitnessInvalid("witness maps a non-zero column onto a zero column")
        sigma_s.append(pos_in_g[src])
    diag_s = tuple(w.M.diag[j] for j in kept_g)
    m_s = Mono(fld, Perm(tuple(sigma_s)), diag_s)
    # S acts on rows only, so stripping leaves it alone; the rank stage
    # conjugates it by the recorded row transforms and keeps the leading block.
    r = journal.rank
    t_full = journal.u_h.mul(w.S).mul(journal.u_g.inv())
    s_norm = Mat(fld, [row[:r] for row in t_full.rows[:r]], r)
    out = Witness(s_norm, m_s)
    if not verify_witness(journal.normalized, out):
        raise WitnessInvalid("witness does not survive normalization")
    return out


def map_witness_to_original(journal: Journal, w: Witness) -> Witness:
    """Turn a witness for the normalized instance into one for the original:
    dropped zero columns are re-inserted (paired in ascending index order)
    and S is padded with the identity on the discarded row complement."""
    if not verify_witness(journal.normalized, w):
        raise WitnessInvalid("witness does not verify on the normalized instance")
    if journal.trivial:
        return w
    orig = journal.original
    fld = orig.field
    k = orig.k
    r = journal.rank
    pad = [[0] * k for _ in range(k)]
    for i in range(r):
        for j in range(r):
            pad[i][j] = w.S.rows[i][j]
    for i in range(r, k):
        pad[i][i] = 1
    s_full = journal.u_h.inv().mul(Mat(fld, pad, k)).mul(journal.u_g)

    kept_g = _kept(orig.n, journal.removed_g)
    kept_h = _kept(orig.n, journal.removed_h)
    sigma = [0] * orig.n
    diag = [1] * orig.n
    for t, j in enumerate(kept_h):
        src = kept_g[w.M.perm.sigma[t]]
        sigma[j] = src
        diag[src] = w.M.diag[w.M.perm.sigma[t]]
    for zh, zg in zip(journal.removed_h, journal.removed_g):
        sigma[zh] = zg
    out = Witness(s_full, Mono(fld, Perm(tuple(sigma)), tuple(diag)))
    if not verify_witness(orig, out):
        raise WitnessInvalid("reconstructed witness fails on the original instance")
    return out

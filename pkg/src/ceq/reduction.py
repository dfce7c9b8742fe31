"""The gadget construction and the Karp reductions PCE -> LCE / SPCE,
with constructive witness lifting and extraction.

Given a k x n generator matrix A with no zero column and full row rank,
the gadget produces a (k+1) x (n + 2nm + 1) matrix laid out as three
column blocks:

    [ A        | A-hat     | 0 ]
    [ 1 1 .. 1 | 0 0 ... 0 | 1 1 ... 1 ]

where A-hat repeats each column of A exactly m times (m is one more
than the largest column multiplicity) and the last block has nm + 1
columns. The duplication counts and the marker row force any monomial
equivalence of a gadget pair to respect the block boundaries and to use
one global scalar on the first block, which is what makes witness
extraction possible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import (
    Instance,
    Journal,
    Rejection,
    RejectReason,
    Tag,
    Witness,
    preprocess,
    verify_witness,
)
from .errors import DimMismatch, StructureViolation, WitnessInvalid
from .field import Field
from .matrix import Mat, Mono, Perm, max_column_multiplicity

CHECK_BLOCKS = "permutation crosses gadget block boundaries"
CHECK_BASIS = "change of basis couples the marker row with the code rows"
CHECK_SCALAR = "first-block scaling is not a single global scalar"


@dataclass(frozen=True)
class ReductionCert:
    """Bookkeeping for one reduction run, needed to lift or extract.

    n, k, m describe the matrices the gadget was applied to (after
    normalization); journal maps between those and the raw input. On the
    reject path no gadget is built: the canonical NO pair is emitted and
    reject_reason is set. A 0-width input short-circuits to the canonical
    YES pair with degenerate set.
    """

    field: Field
    target: Tag
    n: int
    k: int
    m: int
    journal: Optional[Journal] = None
    reject_reason: Optional[RejectReason] = None
    degenerate: bool = False

    def __post_init__(self):
        if self.reject_reason is None and not self.degenerate:
            if self.n >= 1 and self.m < 2:
                raise ValueError("duplication count must be at least 2")

    @property
    def rejected(self) -> bool:
        return self.reject_reason is not None

    @property
    def n_prime(self) -> int:
        return self.n + 2 * self.n * self.m + 1

    @property
    def blocks(self) -> tuple[range, range, range]:
        """Half-open column ranges of the three gadget blocks (0-based)."""
        n, m = self.n, self.m
        return (range(0, n), range(n, n + n * m), range(n + n * m, self.n_prime))


def build_gadget(a: Mat, m: int) -> Mat:
    """Expand a k x n matrix into its (k+1) x (n + 2nm + 1) gadget form.

    Full row rank of the input is preserved; that is asserted here.
    """
    if a.n < 1:
        raise DimMismatch("gadget needs at least one column")
    if m < 1:
        raise ValueError("duplication count must be at least 1")
    k, n = a.k, a.n
    nm = n * m
    dup = [c for c in range(n) for _ in range(m)]
    rows = []
    for r in a.rows:
        rows.append(list(r) + [r[c] for c in dup] + [0] * (nm + 1))
    rows.append([1] * n + [0] * nm + [1] * (nm + 1))
    out = Mat(a.field, rows, n + 2 * nm + 1)
    assert out.n == n + 2 * n * m + 1 and out.k == k + 1
    if a.rank() == k:
        assert out.rank() == k + 1, "gadget lost full row rank"
    return out


def canonical_no_instance(fld: Field, target: Tag) -> Instance:
    """A fixed 1x2 pair that is a NO instance of every tag over every field:
    one row space contains a weight-1 vector, the other cannot."""
    return Instance(fld, Mat(fld, [[1, 1]]), Mat(fld, [[1, 0]]), target)


def canonical_yes_instance(fld: Field, target: Tag) -> Instance:
    return Instance(fld, Mat(fld, [[1]]), Mat(fld, [[1]]), target)


def reduce_instance(inst: Instance, target: Tag) -> tuple[Instance, ReductionCert]:
    """Karp-reduce a PCE instance to the target problem (LCE or SPCE).

    Deterministic; always emits an instance. Rejections from
    preprocessing become the canonical NO pair, 0-width inputs the
    canonical YES pair; otherwise both normalized matrices go through
    the gadget with a shared duplication count.
    """
    if inst.tag is not Tag.PCE:
        raise ValueError("reduction input must be a PCE instance")
    if target not in (Tag.LCE, Tag.SPCE):
        raise ValueError("reduction target must be LCE or SPCE")
    outcome = preprocess(inst)
    if isinstance(outcome, Rejection):
        cert = ReductionCert(inst.field, target, 0, 0, 0, None, outcome.reason)
        return canonical_no_instance(inst.field, target), cert
    norm = outcome.instance
    journal = outcome.journal
    if norm.n == 0:
        cert = ReductionCert(inst.field, target, 0, 0, 0, journal, None, True)
        return canonical_yes_instance(inst.field, target), cert
    m_g = max_column_multiplicity(norm.G)
    m_h = max_column_multiplicity(norm.H)
    assert m_g == m_h, "profile check should have rejected this pair"
    m = m_g + 1
    g_prime = build_gadget(norm.G, m)
    h_prime = build_gadget(norm.H, m)
    cert = ReductionCert(inst.field, target, norm.n, norm.k, m, journal)
    reduced = Instance(inst.field, g_prime, h_prime, target)
    assert reduced.n == cert.n_prime and reduced.k == cert.k + 1
    return reduced, cert


def rebuild_cert(original: Instance, data) -> ReductionCert:
    """Recombine a parsed cert file (fileio.CertData) with the original
    instance it came from, re-deriving the journal and cross-checking the
    recorded fields against a fresh preprocessing run."""
    from .errors import FormatError

    if data.rejected:
        return ReductionCert(data.field, data.target, 0, 0, 0, None, data.reject_reason)
    if original.field != data.field:
        raise FormatError("cert field differs from the instance field")
    if original.tag is not Tag.PCE:
        raise FormatError("cert must pair with a PCE instance")
    outcome = preprocess(original)
    if isinstance(outcome, Rejection):
        raise FormatError("instance rejects under preprocessing but cert does not")
    j = outcome.journal
    recorded = (
        data.journal_n,
        data.journal_k,
        data.journal_rank,
        data.removed_g,
        data.removed_h,
        data.u_g,
        data.u_h,
    )
    derived = (
        original.n,
        original.k,
        j.rank,
        j.removed_g,
        j.removed_h,
        j.u_g,
        j.u_h,
    )
    if recorded != derived:
        raise FormatError("cert journal does not match the given instance")
    if data.degenerate:
        if outcome.instance.n != 0:
            raise FormatError("cert marked degenerate but the instance is not 0-width")
        return ReductionCert(data.field, data.target, 0, 0, 0, j, None, True)
    norm = outcome.instance
    if (norm.n, norm.k) != (data.n, data.k):
        raise FormatError("cert dimensions do not match the normalized instance")
    if max_column_multiplicity(norm.G) + 1 != data.m:
        raise FormatError("cert duplication count does not match the instance")
    return ReductionCert(data.field, data.target, data.n, data.k, data.m, j)


# ---------------------------------------------------------------------------
# witness lifting (original pair -> gadget pair)


def lift_witness(cert: ReductionCert, w: Witness) -> Witness:
    """Lift a PCE witness of the normalized pair to the gadget pair.

    S grows by an untouched marker coordinate; the permutation acts as
    before on block 1, moves each duplicated column along with its
    source in block 2, and fixes block 3 pointwise. The result is a pure
    permutation witness, hence valid for PCE, SPCE, and LCE alike.
    """
    if cert.rejected:
        raise WitnessInvalid("rejected reductions have no YES witnesses to lift")
    fld = cert.field
    if cert.degenerate:
        return Witness(Mat.identity(fld, 1), Mono.identity(fld, 1))
    n, k, m = cert.n, cert.k, cert.m
    if w.S.k != k or w.S.n != k or w.M.n != n:
        raise WitnessInvalid(f"witness shaped for {w.S.k}x{w.M.n}, expected {k}x{n}")
    if not w.M.is_permutation():
        raise WitnessInvalid("lift needs a pure permutation witness")
    s_rows = [list(r) + [0] for r in w.S.rows]
    s_rows.append([0] * k + [1])
    s_prime = Mat(fld, s_rows, k + 1)
    sigma = w.M.perm.sigma
    nm = n * m
    sigma_prime = list(range(cert.n_prime))
    for x in range(n):
        sigma_prime[x] = sigma[x]
    for x in range(n, n + nm):
        i, j = divmod(x - n, m)
        sigma_prime[x] = n + m * sigma[i] + j
    return Witness(s_prime, Mono.from_perm(fld, Perm(tuple(sigma_prime))))


# ---------------------------------------------------------------------------
# witness extraction (gadget pair -> original pair)


def extract_witness(cert: ReductionCert, g: Mat, h: Mat, w: Witness) -> Witness:
    """Extract a PCE witness for (g, h) from any verifying witness of the
    gadget pair built from them.

    The structural checks run first and raise StructureViolation when
    they fail; on a genuine gadget pair they cannot fail for a verifying
    witness, so a violation signals a bug or a corrupted input. After
    the checks, the first-block scalar is folded into the change of
    basis: with M_1 = a * P, the pair (a * S, P) verifies on (g, h).
    """
    if cert.rejected:
        raise WitnessInvalid("rejected reductions have no witnesses to extract")
    fld = cert.field
    if cert.degenerate:
        return Witness(Mat.identity(fld, g.k), Mono.identity(fld, g.n))
    n, k, m = cert.n, cert.k, cert.m
    if (g.k, g.n) != (k, n) or (h.k, h.n) != (k, n):
        raise DimMismatch(f"expected {k}x{n} inputs for this cert")
    n_prime = cert.n_prime
    if w.S.k != k + 1 or w.S.n != k + 1 or w.M.n != n_prime:
        raise WitnessInvalid(
            f"witness shaped for {w.S.k}x{w.M.n}, expected {k + 1}x{n_prime}"
        )

    b1, b2, b3 = cert.blocks
    sigma = w.M.perm.sigma
    for block in (b1, b2, b3):
        for c in block:
            if sigma[c] not in block:
                raise StructureViolation(
                    CHECK_BLOCKS, f"column {c + 1} drawn from column {sigma[c] + 1}"
                )

    s_rows = w.S.rows
    bad_col = any(s_rows[i][k] != 0 for i in range(k))
    bad_row = any(s_rows[k][j] != 0 for j in range(k))
    if bad_col or bad_row or s_rows[k][k] == 0:
        raise StructureViolation(CHECK_BASIS)

    scalars = {w.M.diag[sigma[c]] for c in b1}
    if len(scalars) > 1:
        raise StructureViolation(CHECK_SCALAR, f"saw scalars {sorted(scalars)}")
    a = scalars.pop() if scalars else 1

    g_prime = build_gadget(g, m)
    h_prime = build_gadget(h, m)
    if not verify_witness(Instance(fld, g_prime, h_prime, cert.target), w):
        raise WitnessInvalid("witness does not verify on the gadget pair")

    s_block = Mat(fld, [row[:k] for row in s_rows[:k]], k)
    out = Witness(
        s_block.scale(a),
        Mono.from_perm(fld, Perm(tuple(sigma[c] for c in b1))),
    )
    assert verify_witness(Instance(fld, g, h, Tag.PCE), out)
    return out

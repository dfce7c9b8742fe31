import itertools

import pytest

from ceq.core import Instance, Tag, Witness, preprocess, map_witness_to_normalized, verify_witness
from ceq.errors import DimMismatch, StructureViolation, WitnessInvalid
from ceq.field import field
from ceq.matrix import Mat, Mono, Perm
from ceq.oracle import Budget, Mode, Status, decide
from ceq.reduction import (
    CHECK_BASIS,
    CHECK_BLOCKS,
    CHECK_SCALAR,
    build_gadget,
    canonical_no_instance,
    extract_witness,
    lift_witness,
    reduce_instance,
)
from ceq.rng import stream

F2 = field(2)
F3 = field(3)
F5 = field(5)


def planted_pce(fld, k, n, rng, zero_cols=0, dup_col=False):
    while True:
        rows = [[rng.randrange(fld.q) for _ in range(n)] for _ in range(k)]
        g = Mat(fld, rows, n)
        if g.rank() == k:
            break
    if dup_col and n >= 2:
        rows = [list(r) for r in g.rows]
        src = rng.randrange(n)
        dst = rng.randrange(n)
        if src != dst and g.rank() == k:
            for r in rows:
                r[dst] = r[src]
            cand = Mat(fld, rows, n)
            if cand.rank() == k:
                g = cand
    if zero_cols:
        rows = [list(r) for r in g.rows]
        for _ in range(zero_cols):
            pos = rng.randrange(len(rows[0]) + 1)
            for r in rows:
                r.insert(pos, 0)
        g = Mat(fld, rows, g.n + zero_cols)
    n_full = g.n
    while True:
        s = Mat(fld, [[rng.randrange(fld.q) for _ in range(k)] for _ in range(k)], k)
        if s.is_invertible():
            break
    sigma = list(range(n_full))
    rng.shuffle(sigma)
    m = Mono.from_perm(fld, Perm(tuple(sigma)))
    h = s.mul(g).apply_mono(m)
    return Instance(fld, g, h, Tag.PCE), Witness(s, m)


# ---------------------------------------------------------------------------
# gadget shape


def test_gadget_1x1_layout():
    out = build_gadget(Mat(F2, [[1]]), 2)
    assert (out.k, out.n) == (2, 6)
    assert out.rows == ((1, 1, 1, 0, 0, 0), (1, 0, 0, 1, 1, 1))


def test_gadget_identity_layout():
    out = build_gadget(Mat.identity(F2, 2), 2)
    assert (out.k, out.n) == (3, 11)
    # block 2 duplicates each source column twice, with a zero marker row
    assert [out.col(c) for c in range(2, 6)] == [(1, 0, 0), (1, 0, 0), (0, 1, 0), (0, 1, 0)]
    # block 3 is nm+1 = 5 copies of the last standard basis vector
    assert all(out.col(c) == (0, 0, 1) for c in range(6, 11))
    # block 1 carries the original columns over a ones marker row
    assert out.col(0) == (1, 0, 1) and out.col(1) == (0, 1, 1)


def test_gadget_blowup_identity_and_rank():
    rng = stream(31, "blowup")
    for _ in range(40):
        fld = rng.choice([F2, F3, F5])
        k = rng.randrange(1, 4)
        n = rng.randrange(max(k, 1), 6)
        while True:
            a = Mat(fld, [[rng.randrange(fld.q) for _ in range(n)] for _ in range(k)], n)
            if a.rank() == k:
                break
        m = rng.randrange(1, 5)
        out = build_gadget(a, m)
        assert out.n == n + 2 * n * m + 1
        assert out.k == k + 1
        assert out.rank() == k + 1


def test_gadget_needs_columns():
    with pytest.raises(DimMismatch):
        build_gadget(Mat.zeros(F2, 2, 0), 2)


# ---------------------------------------------------------------------------
# reduction


def test_reduce_identity_pair():
    i2 = Mat.identity(F2, 2)
    red, cert = reduce_instance(Instance(F2, i2, i2, Tag.PCE), Tag.LCE)
    assert red.G == red.H
    assert (red.k, red.n) == (3, 11)
    assert (cert.n, cert.k, cert.m) == (2, 2, 2)
    assert cert.n_prime == 11
    assert [list(b) for b in cert.blocks] == [[0, 1], [2, 3, 4, 5], [6, 7, 8, 9, 10]]


def test_reduce_requires_pce_input():
    i2 = Mat.identity(F2, 2)
    with pytest.raises(ValueError):
        reduce_instance(Instance(F2, i2, i2, Tag.LCE), Tag.LCE)
    with pytest.raises(ValueError):
        reduce_instance(Instance(F2, i2, i2, Tag.PCE), Tag.PCE)


def test_reduce_reject_emits_canonical_no():
    g = Mat(F2, [[1, 0]])
    h = Mat(F2, [[1, 1]])
    red, cert = reduce_instance(Instance(F2, g, h, Tag.PCE), Tag.LCE)
    assert cert.rejected
    assert red == canonical_no_instance(F2, Tag.LCE)


def test_canonical_no_pair_is_no_over_many_fields():
    for fld in (F2, F3, field(2, 2), F5, field(7), field(3, 2)):
        for tag in (Tag.LCE, Tag.SPCE, Tag.PCE):
            inst = canonical_no_instance(fld, tag)
            res = decide(inst, Budget(mode=Mode.EXHAUSTIVE))
            assert res.status is Status.NO, (fld, tag)


def test_reduce_degenerate_zero_width():
    g = Mat.zeros(F2, 2, 0)
    red, cert = reduce_instance(Instance(F2, g, g, Tag.PCE), Tag.SPCE)
    assert cert.degenerate
    assert red.G.rows == ((1,),) and red.H.rows == ((1,),)
    lifted = lift_witness(cert, Witness(Mat.identity(F2, 0), Mono.identity(F2, 0)))
    assert verify_witness(red, lifted)


def test_reduced_yes_pair_is_yes_for_both_targets():
    i2 = Mat.identity(F2, 2)
    sw = Mat(F2, [[0, 1], [1, 0]])
    inst = Instance(F2, i2, sw, Tag.PCE)
    for target in (Tag.LCE, Tag.SPCE):
        red, cert = reduce_instance(inst, target)
        res = decide(red, Budget(mode=Mode.BACKTRACKING))
        assert res.status is Status.YES


# ---------------------------------------------------------------------------
# lifting


def test_lift_identity_witness():
    i2 = Mat.identity(F3, 2)
    red, cert = reduce_instance(Instance(F3, i2, i2, Tag.PCE), Tag.LCE)
    w = Witness(Mat.identity(F3, 2), Mono.identity(F3, 2))
    lifted = lift_witness(cert, w)
    assert lifted.S == Mat.identity(F3, 3)
    assert lifted.M.perm.is_identity()
    assert verify_witness(red, lifted)


def test_lift_swap_block_map():
    # n = 2, m = 2, sigma = swap: in 1-based terms the lifted map sends
    # position 3 to 5, position 5 to 3, and fixes positions 7..11
    i2 = Mat.identity(F2, 2)
    sw = Mat(F2, [[0, 1], [1, 0]])
    inst = Instance(F2, i2, sw, Tag.PCE)
    red, cert = reduce_instance(inst, Tag.LCE)
    w = Witness(Mat.identity(F2, 2), Mono.from_perm(F2, Perm((1, 0))))
    w_norm = map_witness_to_normalized(cert.journal, w)
    lifted = lift_witness(cert, w_norm)
    one_based = [s + 1 for s in lifted.M.perm.sigma]
    assert one_based[2] == 5 and one_based[4] == 3
    assert all(one_based[x - 1] == x for x in range(7, 12))
    assert verify_witness(red, lifted)
    assert verify_witness(Instance(F2, red.G, red.H, Tag.PCE), lifted)
    assert verify_witness(Instance(F2, red.G, red.H, Tag.SPCE), lifted)


def test_lift_requires_pure_permutation():
    g = Mat(F3, [[1, 2]])
    red, cert = reduce_instance(Instance(F3, g, g, Tag.PCE), Tag.LCE)
    scaled = Witness(Mat.identity(F3, 1), Mono(F3, Perm((0, 1)), (2, 2)))
    with pytest.raises(WitnessInvalid):
        lift_witness(cert, scaled)


def test_lift_on_rejected_cert_fails():
    red, cert = reduce_instance(
        Instance(F2, Mat(F2, [[1, 0]]), Mat(F2, [[1, 1]]), Tag.PCE), Tag.LCE
    )
    with pytest.raises(WitnessInvalid):
        lift_witness(cert, Witness(Mat.identity(F2, 1), Mono.identity(F2, 2)))


def test_lift_completeness_randomized():
    rng = stream(37, "complete")
    for trial in range(40):
        fld = rng.choice([F2, F3, F5, field(2, 2)])
        k = rng.randrange(1, 4)
        n = rng.randrange(k, 6)
        inst, w = planted_pce(fld, k, n, rng, zero_cols=rng.randrange(0, 2), dup_col=rng.random() < 0.5)
        for target in (Tag.LCE, Tag.SPCE):
            red, cert = reduce_instance(inst, target)
            assert not cert.rejected
            w_norm = map_witness_to_normalized(cert.journal, w)
            lifted = lift_witness(cert, w_norm)
            assert verify_witness(red, lifted)
            assert verify_witness(Instance(fld, red.G, red.H, Tag.PCE), lifted)


# ---------------------------------------------------------------------------
# extraction


def test_extract_round_trip_identity():
    i2 = Mat.identity(F2, 2)
    red, cert = reduce_instance(Instance(F2, i2, i2, Tag.PCE), Tag.LCE)
    w = Witness(Mat.identity(F2, 2), Mono.identity(F2, 2))
    lifted = lift_witness(cert, w)
    norm = cert.journal.normalized
    back = extract_witness(cert, norm.G, norm.H, lifted)
    assert back.S == Mat.identity(F2, 2)
    assert back.M.perm.is_identity()


def test_extract_from_solver_witness():
    i2 = Mat.identity(F2, 2)
    sw = Mat(F2, [[0, 1], [1, 0]])
    inst = Instance(F2, i2, sw, Tag.PCE)
    red, cert = reduce_instance(inst, Tag.LCE)
    res = decide(red, Budget(mode=Mode.EXHAUSTIVE))
    assert res.status is Status.YES
    norm = cert.journal.normalized
    got = extract_witness(cert, norm.G, norm.H, res.witness)
    assert got.M.is_permutation()
    assert verify_witness(Instance(F2, norm.G, norm.H, Tag.PCE), got)


def test_extract_scaled_witness_folds_global_scalar():
    # scale a lifted permutation witness by a global unit; extraction must
    # still recover an unsigned permutation witness
    rng = stream(41, "scaled")
    inst, w = planted_pce(F5, 2, 3, rng)
    red, cert = reduce_instance(inst, Tag.LCE)
    w_norm = map_witness_to_normalized(cert.journal, w)
    lifted = lift_witness(cert, w_norm)
    a = 3
    scaled = Witness(
        lifted.S.scale(F5.inv(a)),
        Mono(F5, lifted.M.perm, tuple(F5.mul(a, d) for d in lifted.M.diag)),
    )
    assert verify_witness(red, scaled)
    norm = cert.journal.normalized
    got = extract_witness(cert, norm.G, norm.H, scaled)
    assert got.M.is_permutation()
    assert verify_witness(Instance(F5, norm.G, norm.H, Tag.PCE), got)


def test_extract_block_violation():
    i2 = Mat.identity(F2, 2)
    sw = Mat(F2, [[0, 1], [1, 0]])
    red, cert = reduce_instance(Instance(F2, i2, sw, Tag.PCE), Tag.LCE)
    w = Witness(Mat.identity(F2, 2), Mono.from_perm(F2, Perm((1, 0))))
    lifted = lift_witness(cert, map_witness_to_normalized(cert.journal, w))
    sigma = list(lifted.M.perm.sigma)
    sigma[0], sigma[2] = sigma[2], sigma[0]
    crossed = Witness(lifted.S, Mono.from_perm(F2, Perm(tuple(sigma))))
    norm = cert.journal.normalized
    with pytest.raises(StructureViolation) as exc:
        extract_witness(cert, norm.G, norm.H, crossed)
    assert exc.value.check == CHECK_BLOCKS


def test_extract_basis_violation():
    i2 = Mat.identity(F2, 2)
    red, cert = reduce_instance(Instance(F2, i2, i2, Tag.PCE), Tag.LCE)
    lifted = lift_witness(cert, Witness(i2, Mono.identity(F2, 2)))
    rows = [list(r) for r in lifted.S.rows]
    rows[0][2] = 1  # couple the marker coordinate into the code rows
    bad = Witness(Mat(F2, rows), lifted.M)
    norm = cert.journal.normalized
    with pytest.raises(StructureViolation) as exc:
        extract_witness(cert, norm.G, norm.H, bad)
    assert exc.value.check == CHECK_BASIS


def test_extract_scalar_violation():
    rng = stream(43, "scalarviolation")
    inst, w = planted_pce(F5, 2, 3, rng)
    red, cert = reduce_instance(inst, Tag.LCE)
    lifted = lift_witness(cert, map_witness_to_normalized(cert.journal, w))
    diag = list(lifted.M.diag)
    diag[0] = 2  # one first-block source scaled differently
    bad = Witness(lifted.S, Mono(F5, lifted.M.perm, tuple(diag)))
    norm = cert.journal.normalized
    with pytest.raises(StructureViolation) as exc:
        extract_witness(cert, norm.G, norm.H, bad)
    assert exc.value.check == CHECK_SCALAR


def test_extract_rejects_non_verifying_witness():
    # structure-clean but wrong permutation inside block 1
    i2 = Mat.identity(F2, 2)
    sw = Mat(F2, [[0, 1], [1, 0]])
    red, cert = reduce_instance(Instance(F2, i2, sw, Tag.PCE), Tag.LCE)
    w = Witness(Mat.identity(F2, 2), Mono.from_perm(F2, Perm((1, 0))))
    lifted = lift_witness(cert, map_witness_to_normalized(cert.journal, w))
    wrong = Witness(Mat.identity(F2, 3), lifted.M)
    norm = cert.journal.normalized
    with pytest.raises(WitnessInvalid):
        extract_witness(cert, norm.G, norm.H, wrong)


def test_extract_from_spce_target_witnesses():
    rng = stream(53, "spce-extract")
    fields = [F2, F3, F5, field(2, 2), field(3, 2)]
    for i in range(25):
        fld = rng.choice(fields)
        n = rng.randrange(1, 5)
        k = rng.randrange(1, min(n, 3) + 1)
        inst, _ = planted_pce(fld, k, n, rng)
        red, cert = reduce_instance(inst, Tag.SPCE)
        res = decide(red, Budget(mode=Mode.BACKTRACKING))
        assert res.status is Status.YES
        assert res.witness.M.is_signed()
        norm = cert.journal.normalized
        got = extract_witness(cert, norm.G, norm.H, res.witness)
        assert got.M.is_permutation()
        assert verify_witness(Instance(fld, norm.G, norm.H, Tag.PCE), got)


# ---------------------------------------------------------------------------
# soundness sweep: every k x n pair over F_2 with k, n <= 2


def _all_mats(fld, k, n):
    cells = k * n
    for bits in itertools.product(range(fld.q), repeat=cells):
        rows = [bits[i * n : (i + 1) * n] for i in range(k)]
        yield Mat(fld, rows, n)


def test_soundness_exhaustive_sweep_q2():
    budget = Budget(max_nodes=10_000_000, mode=Mode.EXHAUSTIVE)
    checked = 0
    for k in (1, 2):
        for n in (1, 2):
            for g in _all_mats(F2, k, n):
                for h in _all_mats(F2, k, n):
                    inst = Instance(F2, g, h, Tag.PCE)
                    truth = decide(inst, budget)
                    assert truth.status in (Status.YES, Status.NO)
                    red, cert = reduce_instance(inst, Tag.LCE)
                    reduced_res = decide(red, budget)
                    assert reduced_res.status in (Status.YES, Status.NO)
                    # Karp property, both directions at oracle scale
                    assert reduced_res.status == truth.status, (g.rows, h.rows)
                    checked += 1
    assert checked == 4 + 16 + 16 + 256


def test_stripping_preserves_decision():
    rng = stream(47, "strip")
    budget = Budget(mode=Mode.EXHAUSTIVE)
    for _ in range(30):
        fld = rng.choice([F2, F3])
        k = rng.randrange(1, 3)
        n = rng.randrange(k, 4)
        inst, _ = planted_pce(fld, k, n, rng, zero_cols=rng.randrange(0, 3))
        out = preprocess(inst)
        truth = decide(inst, budget)
        from ceq.core import Normalized

        if isinstance(out, Normalized):
            assert decide(out.instance, budget).status == truth.status
        else:
            assert truth.status is Status.NO

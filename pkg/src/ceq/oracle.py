"""Ground-truth deciders and instance generators.

The deciders are deliberately naive searches over the full matrix
groups, meant to validate the reductions at desk scale rather than to
compete with structural equivalence algorithms.

EXHAUSTIVE iterates permutations in lexicographic order of sigma and,
inside each, diagonal vectors in lexicographic order of the encoded
field elements; a candidate action M is accepted when the row spaces of
G*M and H coincide, at which point a change of basis is recovered. The
first verifying candidate in that order is the one returned.

BACKTRACKING assigns the permutation column by column. A partial
assignment pins pairs (x, y) that the change of basis must map onto
each other; the branch dies as soon as the x-side rank, the y-side
rank, and the joint rank of those pairs disagree (an invertible map
with the pinned behaviour then cannot exist), or when column
multiplicity classes are incompatible. Once the x-side rank fills up,
the change of basis is determined and the remainder of the assignment
is forced by lookups instead of search.

Both modes return identical YES/NO answers; witnesses may differ.
"""

from __future__ import annotations

import enum
import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .core import Instance, Tag, Witness, diag_allowed, verify_witness
from .errors import BudgetExceeded
from .field import Field
from .matrix import Mat, Mono, Perm, row_basis_transform, solve_change_of_basis
from .rng import stream


class Mode(enum.Enum):
    EXHAUSTIVE = "exhaustive"
    BACKTRACKING = "backtracking"


class Status(enum.Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Budget:
    max_nodes: int = 100_000_000
    time_limit: Optional[float] = None
    mode: Mode = Mode.EXHAUSTIVE

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be at least 1")


@dataclass(frozen=True)
class DecideResult:
    status: Status
    witness: Optional[Witness]
    nodes: int
    elapsed: float
    detail: str = ""


def _scalars(fld: Field, tag: Tag) -> tuple[int, ...]:
    if tag is Tag.PCE:
        return (1,)
    if tag is Tag.SPCE:
        return fld.signs()
    return tuple(fld.units())


class _OutOfBudget(Exception):
    pass


class _Ticker:
    """Node counter with budget enforcement; time is checked in batches."""

    __slots__ = ("nodes", "max_nodes", "deadline", "_check_at")

    def __init__(self, budget: Budget, t0: float):
        self.nodes = 0
        self.max_nodes = budget.max_nodes
        self.deadline = None if budget.time_limit is None else t0 + budget.time_limit
        self._check_at = 4096

    def tick(self):
        self.nodes += 1
        if self.nodes >= self._check_at:
            self._check_at += 4096
            if self.deadline is not None and time.perf_counter() > self.deadline:
                raise _OutOfBudget
        if self.nodes > self.max_nodes:
            raise _OutOfBudget


# ---------------------------------------------------------------------------
# exhaustive search


def _recover_basis(gm: Mat, h: Mat) -> Optional[Mat]:
    if gm.rank() == gm.k:
        return solve_change_of_basis(gm, h)
    return row_basis_transform(gm, h)


def _exhaustive(inst: Instance, budget: Budget, first: Optional[int], ticker: _Ticker):
    """Scan candidates; optionally restrict to sigma[0] == first. Returns a
    witness or None after scanning the whole (sub)space."""
    fld, g, h = inst.field, inst.G, inst.H
    n = g.n
    scal = _scalars(fld, inst.tag)
    rg, rank_g, _ = g.rref()
    rh, rank_h, piv_h = h.rref()
    reduced_rows = [list(r) for r in rg.rows[:rank_g]]
    h_pivot_rows = [(piv_h[i], rh.rows[i]) for i in range(rank_h)]

    flat = fld.flat_ops()
    if flat:
        _, sub_t, mul_t, _, _ = flat
        q = fld.q

        def member(v):
            for pc, prow in h_pivot_rows:
                coef = v[pc]
                if coef:
                    base = coef * q
                    v = [sub_t[v[j] * q + mul_t[base + prow[j]]] for j in range(n)]
            return not any(v)

        def scaled_row(row, sigma, diag):
            return [mul_t[diag[s] * q + row[s]] for s in sigma]

    else:
        f_sub, f_mul = fld.sub, fld.mul

        def member(v):
            for pc, prow in h_pivot_rows:
                coef = v[pc]
                if coef:
                    v = [f_sub(v[j], f_mul(coef, prow[j])) for j in range(n)]
            return not any(v)

        def scaled_row(row, sigma, diag):
            return [f_mul(diag[s], row[s]) for s in sigma]

    if first is None:
        perms = itertools.permutations(range(n))
    elif n == 0:
        perms = iter([()]) if first == 0 else iter(())
    else:
        rest = [i for i in range(n) if i != first]
        perms = ((first,) + tail for tail in itertools.permutations(rest))

    for sigma in perms:
        for diag in itertools.product(scal, repeat=n):
            ticker.tick()
            ok = True
            for row in reduced_rows:
                if not member(scaled_row(row, sigma, diag)):
                    ok = False
                    break
            if not ok:
                continue
            m = Mono(fld, Perm(sigma), diag) if n else Mono.identity(fld, 0)
            s = _recover_basis(g.apply_mono(m), h)
            if s is None:
                continue
            w = Witness(s, m)
            assert verify_witness(inst, w)
            return w
    return None


# ---------------------------------------------------------------------------
# backtracking search


class _Echelon:
    """Incremental row echelon accumulator over a field."""

    __slots__ = ("fld", "rows", "pivots")

    def __init__(self, fld: Field):
        self.fld = fld
        self.rows = []
        self.pivots = []

    def insert(self, vec) -> bool:
        """Reduce vec against the basis; extend and return True if it adds rank."""
        fld = self.fld
        v = list(vec)
        for piv, row in zip(self.pivots, self.rows):
            coef = v[piv]
            if coef:
                v = [fld.sub(v[j], fld.mul(coef, row[j])) for j in range(len(v))]
        for j, x in enumerate(v):
            if x:
                inv = fld.inv(x)
                self.rows.append([fld.mul(inv, y) for y in v])
                self.pivots.append(j)
                return True
        return False

    def pop(self):
        self.rows.pop()
        self.pivots.pop()

    @property
    def rank(self) -> int:
        return len(self.rows)


def _class_key(fld: Field, tag: Tag, col: tuple) -> tuple:
    """Canonical representative of a column under the tag's scalar action."""
    if tag is Tag.PCE:
        return col
    if tag is Tag.SPCE:
        neg = fld.neg
        flipped = tuple(neg(x) for x in col)
        return min(col, flipped)
    for x in col:
        if x:
            u = fld.inv(x)
            return tuple(fld.mul(u, y) for y in col)
    return col


class _Backtracker:
    def __init__(self, inst: Instance, ticker: _Ticker):
        self.inst = inst
        self.fld = inst.field
        self.tag = inst.tag
        self.k = inst.k
        self.n = inst.n
        self.ticker = ticker
        self.gcols = inst.G.cols()
        self.hcols = inst.H.cols()
        self.scalars = _scalars(self.fld, self.tag)
        self.zero = (0,) * self.k

        fld, tag = self.fld, self.tag
        self.gclass: dict[tuple, list[int]] = {}
        for i, col in enumerate(self.gcols):
            self.gclass.setdefault(_class_key(fld, tag, col), []).append(i)
        self.hclass: dict[tuple, list[int]] = {}
        for j, col in enumerate(self.hcols):
            self.hclass.setdefault(_class_key(fld, tag, col), []).append(j)

        # distinct exact values inside each G class, each with its members
        self.gvalues: dict[tuple, dict[tuple, list[int]]] = {}
        for key, members in self.gclass.items():
            by_val = self.gvalues.setdefault(key, {})
            for i in members:
                by_val.setdefault(self.gcols[i], []).append(i)

        self.used = [False] * self.n
        self.lock: dict[tuple, tuple] = {}
        self.lock_rev: dict[tuple, tuple] = {}
        self.acc_x = _Echelon(fld)
        self.acc_y = _Echelon(fld)
        self.acc_xy = _Echelon(fld)
        self.basis_pairs: list[tuple[tuple, tuple]] = []
        self.sigma = [-1] * self.n
        self.diag = [1] * self.n
        self.s_mat: Optional[Mat] = None
        self.s_inv: Optional[Mat] = None

        # targets ordered by class (small, distinctive classes first)
        order = sorted(self.hclass.items(), key=lambda kv: (len(kv[1]), kv[0]))
        self.targets = [j for _, members in order for j in members]

    def infeasible_by_counting(self) -> bool:
        gsizes = sorted(len(v) for v in self.gclass.values())
        hsizes = sorted(len(v) for v in self.hclass.values())
        if gsizes != hsizes:
            return True
        zg = len(self.gclass.get(self.zero, []))
        zh = len(self.hclass.get(self.zero, []))
        return zg != zh

    # -- constraint stack ----------------------------------------------------

    def _push(self, x: tuple, y: tuple) -> Optional[bool]:
        """None: inconsistent (nothing retained). True: consistent, rank
        grew in all three accumulators. False: consistent, no rank change."""
        dx = self.acc_x.insert(x)
        dy = self.acc_y.insert(y)
        dxy = self.acc_xy.insert(x + y)
        if dx == dy == dxy:
            if dx:
                self.basis_pairs.append((x, y))
                return True
            return False
        if dx:
            self.acc_x.pop()
        if dy:
            self.acc_y.pop()
        if dxy:
            self.acc_xy.pop()
        return None

    def _pop(self, grew: bool):
        if grew:
            self.acc_x.pop()
            self.acc_y.pop()
            self.acc_xy.pop()
            self.basis_pairs.pop()

    def _pin_basis(self):
        fld, k = self.fld, self.k
        xs = [p[0] for p in self.basis_pairs]
        ys = [p[1] for p in self.basis_pairs]
        x_mat = Mat(fld, [[x[i] for x in xs] for i in range(k)], k)
        y_mat = Mat(fld, [[y[i] for y in ys] for i in range(k)], k)
        self.s_mat = y_mat.mul(x_mat.inv())
        self.s_inv = x_mat.mul(y_mat.inv())

    # -- search ---------------------------------------------------------------

    def run(self, first: Optional[int] = None) -> Optional[Witness]:
        if self.infeasible_by_counting():
            return None
        if self.n == 0:
            return self._finish()
        return self._assign(0, first)

    def _candidates(self, j: int):
        """Deterministic candidate list for target column j: (gkey, value,
        rep index, scalar). Duplicates collapse to the smallest unused rep."""
        hkey = _class_key(self.fld, self.tag, self.hcols[j])
        locked = self.lock.get(hkey)
        if locked is not None:
            gkeys = [locked]
        else:
            size = len(self.hclass[hkey])
            gkeys = sorted(
                key
                for key, members in self.gclass.items()
                if len(members) == size and key not in self.lock_rev
            )
        out = []
        for gkey in gkeys:
            for value in sorted(self.gvalues[gkey]):
                rep = next((i for i in self.gvalues[gkey][value] if not self.used[i]), None)
                if rep is None:
                    continue
                if value == self.zero:
                    out.append((gkey, value, rep, 1))
                else:
                    for d in self.scalars:
                        out.append((gkey, value, rep, d))
        return hkey, locked, out

    def _assign(self, t: int, first: Optional[int]) -> Optional[Witness]:
        if t == len(self.targets):
            return self._finish()
        if self.s_mat is not None:
            return self._complete(t)
        j = self.targets[t]
        y = self.hcols[j]
        hkey, locked, cands = self._candidates(j)
        if first is not None:
            cands = cands[first : first + 1]
        fld = self.fld
        mul = fld.mul
        for gkey, value, rep, d in cands:
            self.ticker.tick()
            x = tuple(mul(d, v) for v in value)
            grew = self._push(x, y)
            if grew is None:
                continue
            self.used[rep] = True
            self.sigma[j] = rep
            self.diag[rep] = d
            did_lock = locked is None
            if did_lock:
                self.lock[hkey] = gkey
                self.lock_rev[gkey] = hkey
            pinned = False
            if self.acc_x.rank == self.k and self.s_mat is None:
                self._pin_basis()
                pinned = True
            got = self._assign(t + 1, None)
            if got is not None:
                return got
            if pinned:
                self.s_mat = None
                self.s_inv = None
            if did_lock:
                del self.lock[hkey]
                del self.lock_rev[gkey]
            self.used[rep] = False
            self.sigma[j] = -1
            self.diag[rep] = 1
            self._pop(grew)
        return None

    def _complete(self, t: int) -> Optional[Witness]:
        """With the change of basis pinned, the rest of the assignment is
        forced; consume matching source columns or fail."""
        fld = self.fld
        s_inv_rows = self.s_inv.rows
        consumed = []
        ok = True
        for tt in range(t, len(self.targets)):
            self.ticker.tick()
            j = self.targets[tt]
            y = self.hcols[j]
            x_req = tuple(
                _dot(fld, row, y)
                for row in s_inv_rows
            )
            found = self._consume(j, x_req)
            if found is None:
                ok = False
                break
            consumed.append(found)
        if ok:
            got = self._finish()
            if got is not None:
                return got
        for j, rep in reversed(consumed):
            self.used[rep] = False
            self.sigma[j] = -1
            self.diag[rep] = 1
        return None

    def _consume(self, j: int, x_req: tuple):
        fld = self.fld
        key = _class_key(fld, self.tag, x_req)
        by_val = self.gvalues.get(key)
        if by_val is None:
            return None
        for value in sorted(by_val):
            rep = next((i for i in by_val[value] if not self.used[i]), None)
            if rep is None:
                continue
            if x_req == self.zero:
                d = 1
            else:
                nz = next(i for i, v in enumerate(value) if v)
                d = fld.mul(x_req[nz], fld.inv(value[nz]))
                if not diag_allowed(fld, self.tag, (d,)):
                    continue
                if tuple(fld.mul(d, v) for v in value) != x_req:
                    continue
            self.used[rep] = True
            self.sigma[j] = rep
            self.diag[rep] = d
            return (j, rep)
        return None

    def _finish(self) -> Optional[Witness]:
        fld, k = self.fld, self.k
        if self.n:
            m = Mono(fld, Perm(tuple(self.sigma)), tuple(self.diag))
        else:
            m = Mono.identity(fld, 0)
        if self.s_mat is not None:
            s = self.s_mat
        else:
            s = _extend_to_invertible(fld, k, self.basis_pairs)
        w = Witness(s, m)
        assert verify_witness(self.inst, w)
        return w


def _dot(fld: Field, row, vec) -> int:
    acc = 0
    add, mul = fld.add, fld.mul
    for a, b in zip(row, vec):
        if a and b:
            acc = add(acc, mul(a, b))
    return acc


def _extend_to_invertible(fld: Field, k: int, pairs) -> Mat:
    """Invertible S with S*x = y for the given independent pairs, extended
    greedily by standard basis vectors on both sides."""
    xs = [list(p[0]) for p in pairs]
    ys = [list(p[1]) for p in pairs]
    acc_x = _Echelon(fld)
    acc_y = _Echelon(fld)
    for x in xs:
        assert acc_x.insert(x)
    for y in ys:
        assert acc_y.insert(y)
    basis_x, basis_y = list(xs), list(ys)
    for i in range(k):
        e = [1 if t == i else 0 for t in range(k)]
        if acc_x.insert(e):
            basis_x.append(e)
    for i in range(k):
        e = [1 if t == i else 0 for t in range(k)]
        if acc_y.insert(e):
            basis_y.append(e)
    assert len(basis_x) == k and len(basis_y) == k
    bx = Mat(fld, [[col[i] for col in basis_x] for i in range(k)], k)
    by = Mat(fld, [[col[i] for col in basis_y] for i in range(k)], k)
    return by.mul(bx.inv())


def _backtracking(inst: Instance, budget: Budget, first: Optional[int], ticker: _Ticker):
    return _Backtracker(inst, ticker).run(first)


# ---------------------------------------------------------------------------
# public decide


def _root_width(inst: Instance, mode: Mode) -> int:
    if inst.n == 0:
        return 1
    if mode is Mode.EXHAUSTIVE:
        return inst.n
    bt = _Backtracker(inst, _Ticker(Budget(), time.perf_counter()))
    if bt.infeasible_by_counting():
        return 1
    _, _, cands = bt._candidates(bt.targets[0])
    return max(1, len(cands))


def _run_slice(inst: Instance, budget: Budget, first: Optional[int]):
    """(witness or None, nodes, completed) for one slice of the root."""
    t0 = time.perf_counter()
    ticker = _Ticker(budget, t0)
    try:
        if budget.mode is Mode.EXHAUSTIVE:
            w = _exhaustive(inst, budget, first, ticker)
        else:
            w = _backtracking(inst, budget, first, ticker)
        return w, ticker.nodes, True
    except _OutOfBudget:
        return None, ticker.nodes, False


def decide(inst: Instance, budget: Budget = Budget(), workers: int = 1) -> DecideResult:
    """Decide an instance by brute force under the given budget.

    YES always carries a verifying witness. With workers > 1 the root of
    the search fans out over disjoint slices; results reduce in slice
    order so the answer (and the returned witness) is independent of the
    worker count. The node budget then applies per slice.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1")
    t0 = time.perf_counter()
    if inst.G.rank() != inst.H.rank():
        return DecideResult(Status.NO, None, 0, time.perf_counter() - t0, "rank mismatch")

    if workers == 1:
        w, nodes, completed = _run_slice(inst, budget, None)
        elapsed = time.perf_counter() - t0
        if w is not None:
            return DecideResult(Status.YES, w, nodes, elapsed)
        if completed:
            return DecideResult(Status.NO, None, nodes, elapsed)
        return DecideResult(Status.UNKNOWN, None, nodes, elapsed, "budget exhausted")

    width = _root_width(inst, budget.mode)
    total_nodes = 0
    outcome: Optional[DecideResult] = None
    with ProcessPoolExecutor(max_workers=min(workers, width)) as pool:
        futures = [pool.submit(_run_slice, inst, budget, s) for s in range(width)]
        for fut in futures:
            w, nodes, completed = fut.result()
            total_nodes += nodes
            if outcome is not None:
                continue
            if not completed:
                outcome = DecideResult(
                    Status.UNKNOWN, None, 0, 0.0, "budget exhausted in an early slice"
                )
            elif w is not None:
                outcome = DecideResult(Status.YES, w, 0, 0.0)
    elapsed = time.perf_counter() - t0
    if outcome is None:
        return DecideResult(Status.NO, None, total_nodes, elapsed)
    return DecideResult(outcome.status, outcome.witness, total_nodes, elapsed, outcome.detail)


# ---------------------------------------------------------------------------
# generation


class Planted(enum.Enum):
    YES = "yes"
    NO = "no"
    UNLABELED = "unlabeled"


# size caps for certified-NO generation; beyond these the exhaustive
# certification is no longer desk-scale
NO_CERT_CAPS = {
    Tag.PCE: (6, 16),
    Tag.SPCE: (5, 16),
    Tag.LCE: (4, 5),
}


@dataclass(frozen=True)
class GenSpec:
    field: Field
    k: int
    n: int
    tag: Tag
    planted: Planted
    seed: int
    profile: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.k < 0 or self.n < 0:
            raise ValueError("dimensions must be non-negative")
        if self.planted is not Planted.UNLABELED and self.k > self.n:
            raise ValueError("planted instances need k <= n for full row rank")
        if self.profile is not None:
            if sum(self.profile) != self.n:
                raise ValueError("multiplicity profile must sum to n")
            if any(c < 1 for c in self.profile):
                raise ValueError("multiplicity counts must be positive")
            if len(self.profile) < self.k:
                raise ValueError(
                    "full row rank needs at least k distinct columns; "
                    "the profile has too few parts"
                )


@dataclass(frozen=True)
class Generated:
    instance: Instance
    witness: Optional[Witness] = None


_MAX_SAMPLE_TRIES = 2000
_MAX_NO_TRIES = 256


def _sample_full_rank(spec: GenSpec, rng) -> Mat:
    fld, k, n = spec.field, spec.k, spec.n
    q = fld.q
    for _ in range(_MAX_SAMPLE_TRIES):
        if spec.profile is None:
            rows = [[rng.randrange(q) for _ in range(n)] for _ in range(k)]
            mat = Mat(fld, rows, n)
        else:
            cols = []
            for count in spec.profile:
                col = [rng.randrange(q) for _ in range(k)]
                cols.extend([col] * count)
            rng.shuffle(cols)
            mat = Mat(fld, [[col[i] for col in cols] for i in range(k)], n)
        if mat.rank() == k:
            return mat
    raise BudgetExceeded(f"could not sample a full-rank {k}x{n} matrix over {fld!r}")


def _sample_invertible(fld: Field, k: int, rng) -> Mat:
    q = fld.q
    for _ in range(_MAX_SAMPLE_TRIES):
        m = Mat(fld, [[rng.randrange(q) for _ in range(k)] for _ in range(k)], k)
        if m.is_invertible():
            return m
    raise BudgetExceeded(f"could not sample an invertible {k}x{k} matrix over {fld!r}")


def _sample_action(fld: Field, n: int, tag: Tag, rng) -> Mono:
    sigma = list(range(n))
    rng.shuffle(sigma)
    if tag is Tag.PCE:
        diag = (1,) * n
    elif tag is Tag.SPCE:
        signs = fld.signs()
        diag = tuple(rng.choice(signs) for _ in range(n))
    else:
        diag = tuple(rng.randrange(1, fld.q) for _ in range(n))
    return Mono(fld, Perm(tuple(sigma)), diag)


def generate(spec: GenSpec) -> Generated:
    """Generate an instance from a GenSpec; deterministic in the seed.

    YES plants a witness by construction; NO is certified by the
    exhaustive decider (within the published size caps) and resampled on
    accidental equivalence; UNLABELED skips certification.
    """
    fld = spec.field
    rng = stream(
        spec.seed,
        "gen",
        spec.tag.value,
        spec.planted.value,
        spec.k,
        spec.n,
        fld.p,
        fld.e,
    )
    if spec.planted is Planted.YES:
        g = _sample_full_rank(spec, rng)
        s = _sample_invertible(fld, spec.k, rng)
        m = _sample_action(fld, spec.n, spec.tag, rng)
        h = s.mul(g).apply_mono(m)
        inst = Instance(fld, g, h, spec.tag)
        w = Witness(s, m)
        assert verify_witness(inst, w)
        return Generated(inst, w)
    if spec.planted is Planted.UNLABELED:
        g = _sample_full_rank(spec, rng)
        h = _sample_full_rank(spec, rng)
        return Generated(Instance(fld, g, h, spec.tag))
    cap_n, cap_q = NO_CERT_CAPS[spec.tag]
    if spec.tag is Tag.SPCE and fld.p == 2:
        cap_n, cap_q = NO_CERT_CAPS[Tag.PCE]
    if spec.n > cap_n or fld.q > cap_q:
        raise BudgetExceeded(
            f"certified NO generation for {spec.tag.value} capped at "
            f"n <= {cap_n}, q <= {cap_q}"
        )
    for _ in range(_MAX_NO_TRIES):
        g = _sample_full_rank(spec, rng)
        h = _sample_full_rank(spec, rng)
        inst = Instance(fld, g, h, spec.tag)
        res = decide(inst, Budget(mode=Mode.EXHAUSTIVE))
        if res.status is Status.NO:
            return Generated(inst)
        assert res.status is Status.YES
    raise BudgetExceeded("could not certify a NO instance within the retry budget")

"""Line-oriented text format for instances, witnesses, and reduction certs.

Every file starts with the magic line `%CEQ 1`; unknown versions are
rejected. Lines are single-space separated, files end with one newline,
and serialization is canonical so equal values produce byte-identical
files. Matrix entries and diagonal values use the canonical integer
element encoding (base-p coefficient packing). Permutations are written
1-based in the column convention `(A*P)[i] = A[sigma(i)]`.

Sections, in canonical order:

    %CEQ 1
    field <p>                      or: field <p>^<e> mod <c0,c1,...,1>
    tag <PCE|SPCE|LCE>             instance files
    reject-reason <name>           reduce output on the reject path
    G <k> <n> + k rows             instance files
    H <k> <n> + k rows
    S <k> <k> + k rows             witness files
    perm <s1 ... sn>
    diag <d1 ... dn>
    target <PCE|SPCE|LCE>          cert files
    cert <n> <k> <m>               or: cert rejected | cert degenerate
    journal <n> <k> <rank>         cert files (non-reject path)
    removed-g [i1 ...]             1-based dropped zero-column indices
    removed-h [i1 ...]
    UG <k> <k> + k rows
    UH <k> <k> + k rows
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .core import Instance, RejectReason, Tag, Witness
from .errors import FormatError
from .field import Field, field
from .matrix import Mat, Mono, Perm

MAGIC = "%CEQ 1"

PathLike = Union[str, Path]


@dataclass(frozen=True)
class CertData:
    """Raw cert-file contents; pair with the original instance to rebuild
    a full ReductionCert (see reduction.rebuild_cert)."""

    field: Field
    target: Tag
    n: int
    k: int
    m: int
    rejected: bool = False
    reject_reason: Optional[RejectReason] = None
    degenerate: bool = False
    journal_n: Optional[int] = None
    journal_k: Optional[int] = None
    journal_rank: Optional[int] = None
    removed_g: Optional[tuple[int, ...]] = None
    removed_h: Optional[tuple[int, ...]] = None
    u_g: Optional[Mat] = None
    u_h: Optional[Mat] = None


# ---------------------------------------------------------------------------
# writing


def _field_line(fld: Field) -> str:
    if fld.e == 1:
        return f"field {fld.p}"
    coeffs = ",".join(str(c) for c in fld.modulus)
    return f"field {fld.p}^{fld.e} mod {coeffs}"


def _matrix_lines(label: str, m: Mat) -> list[str]:
    lines = [f"{label} {m.k} {m.n}"]
    lines.extend(" ".join(str(x) for x in row) for row in m.rows)
    return lines


def serialize_instance(inst: Instance, reject_reason: Optional[RejectReason] = None) -> str:
    lines = [MAGIC, _field_line(inst.field), f"tag {inst.tag.value}"]
    if reject_reason is not None:
        lines.append(f"reject-reason {reject_reason.value}")
    lines.extend(_matrix_lines("G", inst.G))
    lines.extend(_matrix_lines("H", inst.H))
    return "\n".join(lines) + "\n"


def serialize_witness(fld: Field, w: Witness) -> str:
    lines = [MAGIC, _field_line(fld)]
    lines.extend(_matrix_lines("S", w.S))
    lines.append("perm " + " ".join(str(s + 1) for s in w.M.perm.sigma))
    lines.append("diag " + " ".join(str(d) for d in w.M.diag))
    return "\n".join(lines) + "\n"


def serialize_cert(cert) -> str:
    """Serialize a reduction.ReductionCert (duck-typed to avoid a cycle)."""
    lines = [MAGIC, _field_line(cert.field), f"target {cert.target.value}"]
    if cert.rejected:
        lines.append("cert rejected")
        lines.append(f"reject-reason {cert.reject_reason.value}")
    else:
        if cert.degenerate:
            lines.append("cert degenerate")
        else:
            lines.append(f"cert {cert.n} {cert.k} {cert.m}")
        j = cert.journal
        orig = j.original
        lines.append(f"journal {orig.n} {orig.k} {j.rank}")
        lines.append(("removed-g " + " ".join(str(i + 1) for i in j.removed_g)).rstrip())
        lines.append(("removed-h " + " ".join(str(i + 1) for i in j.removed_h)).rstrip())
        lines.extend(_matrix_lines("UG", j.u_g))
        lines.extend(_matrix_lines("UH", j.u_h))
    return "\n".join(lines) + "\n"


def write_text(path: PathLike, text: str):
    Path(path).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# parsing


class _Reader:
    def __init__(self, text: str, origin: str):
        self.lines = text.splitlines()
        self.pos = 0
        self.origin = origin

    def error(self, msg: str) -> FormatError:
        return FormatError(f"{self.origin}:{self.pos + 1}: {msg}")

    def done(self) -> bool:
        return self.pos >= len(self.lines)

    def peek_key(self) -> Optional[str]:
        if self.done():
            return None
        return self.lines[self.pos].split(" ", 1)[0]

    def take(self) -> str:
        if self.done():
            raise self.error("unexpected end of file")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def take_ints(self, expected: int) -> list[int]:
        parts = self.take().split()
        try:
            vals = [int(x) for x in parts]
        except ValueError:
            raise self.error("expected integers") from None
        if len(vals) != expected:
            raise self.error(f"expected {expected} integers, got {len(vals)}")
        return vals


def _parse_magic(r: _Reader):
    line = r.take()
    if line != MAGIC:
        raise r.error(f"unknown format version (expected '{MAGIC}')")


def _parse_field(r: _Reader) -> Field:
    line = r.take()
    parts = line.split(" ")
    if parts[0] != "field":
        raise r.error("expected a field line")
    try:
        if len(parts) == 2:
            spec = parts[1]
            if "^" in spec:
                p_s, e_s = spec.split("^", 1)
                return field(int(p_s), int(e_s))
            return field(int(spec))
        if len(parts) == 4 and parts[2] == "mod" and "^" in parts[1]:
            p_s, e_s = parts[1].split("^", 1)
            coeffs = tuple(int(c) for c in parts[3].split(","))
            return field(int(p_s), int(e_s), coeffs)
    except FormatError:
        raise
    except Exception as exc:
        raise r.error(f"bad field spec: {exc}") from None
    raise r.error("bad field line")


def _parse_matrix(r: _Reader, fld: Field, label: str) -> Mat:
    head = r.take().split()
    if len(head) != 3 or head[0] != label:
        raise r.error(f"expected '{label} <k> <n>'")
    try:
        k, n = int(head[1]), int(head[2])
    except ValueError:
        raise r.error("bad matrix dimensions") from None
    if k < 0 or n < 0:
        raise r.error("negative matrix dimensions")
    rows = [r.take_ints(n) for _ in range(k)]
    try:
        return Mat(fld, rows, n)
    except Exception as exc:
        raise r.error(f"bad {label} entries: {exc}") from None


def _parse_tag(r: _Reader, key: str = "tag") -> Tag:
    parts = r.take().split()
    if len(parts) != 2 or parts[0] != key:
        raise r.error(f"expected '{key} <PCE|SPCE|LCE>'")
    try:
        return Tag(parts[1])
    except ValueError:
        raise r.error(f"unknown problem tag {parts[1]!r}") from None


def parse_instance(text: str, origin: str = "<instance>") -> tuple[Instance, Optional[RejectReason]]:
    r = _Reader(text, origin)
    _parse_magic(r)
    fld = _parse_field(r)
    tag = _parse_tag(r)
    reject = None
    if r.peek_key() == "reject-reason":
        parts = r.take().split()
        try:
            reject = RejectReason(parts[1])
        except (IndexError, ValueError):
            raise r.error("bad reject-reason") from None
    g = _parse_matrix(r, fld, "G")
    h = _parse_matrix(r, fld, "H")
    if not r.done():
        raise r.error(f"trailing content {r.lines[r.pos]!r}")
    try:
        return Instance(fld, g, h, tag), reject
    except Exception as exc:
        raise r.error(str(exc)) from None


def parse_witness(text: str, origin: str = "<witness>") -> tuple[Field, Witness]:
    r = _Reader(text, origin)
    _parse_magic(r)
    fld = _parse_field(r)
    s = _parse_matrix(r, fld, "S")
    parts = r.take().split()
    if not parts or parts[0] != "perm":
        raise r.error("expected a perm line")
    try:
        sigma = tuple(int(x) - 1 for x in parts[1:])
    except ValueError:
        raise r.error("bad permutation entries") from None
    parts = r.take().split()
    if not parts or parts[0] != "diag":
        raise r.error("expected a diag line")
    try:
        diag = tuple(int(x) for x in parts[1:])
    except ValueError:
        raise r.error("bad diagonal entries") from None
    if not r.done():
        raise r.error(f"trailing content {r.lines[r.pos]!r}")
    try:
        return fld, Witness(s, Mono(fld, Perm(sigma), diag))
    except Exception as exc:
        raise r.error(str(exc)) from None


def parse_cert(text: str, origin: str = "<cert>") -> CertData:
    r = _Reader(text, origin)
    _parse_magic(r)
    fld = _parse_field(r)
    target = _parse_tag(r, "target")
    parts = r.take().split()
    if not parts or parts[0] != "cert":
        raise r.error("expected a cert line")
    if parts[1:] == ["rejected"]:
        reason_parts = r.take().split()
        if len(reason_parts) != 2 or reason_parts[0] != "reject-reason":
            raise r.error("expected a reject-reason line")
        try:
            reason = RejectReason(reason_parts[1])
        except ValueError:
            raise r.error(f"unknown reject reason {reason_parts[1]!r}") from None
        if not r.done():
            raise r.error("trailing content after rejected cert")
        return CertData(fld, target, 0, 0, 0, rejected=True, reject_reason=reason)
    degenerate = False
    if parts[1:] == ["degenerate"]:
        degenerate = True
        n = k = m = 0
    else:
        try:
            n, k, m = (int(x) for x in parts[1:])
        except ValueError:
            raise r.error("expected 'cert <n> <k> <m>'") from None
    head = r.take().split()
    if len(head) != 4 or head[0] != "journal":
        raise r.error("expected 'journal <n> <k> <rank>'")
    try:
        jn, jk, jrank = int(head[1]), int(head[2]), int(head[3])
    except ValueError:
        raise r.error("bad journal header") from None

    def removed(key: str) -> tuple[int, ...]:
        parts = r.take().split()
        if not parts or parts[0] != key:
            raise r.error(f"expected a {key} line")
        try:
            return tuple(int(x) - 1 for x in parts[1:])
        except ValueError:
            raise r.error(f"bad {key} indices") from None

    rg = removed("removed-g")
    rh = removed("removed-h")
    u_g = _parse_matrix(r, fld, "UG")
    u_h = _parse_matrix(r, fld, "UH")
    if not r.done():
        raise r.error(f"trailing content {r.lines[r.pos]!r}")
    return CertData(
        fld,
        target,
        n,
        k,
        m,
        degenerate=degenerate,
        journal_n=jn,
        journal_k=jk,
        journal_rank=jrank,
        removed_g=rg,
        removed_h=rh,
        u_g=u_g,
        u_h=u_h,
    )


def read_instance(path: PathLike) -> tuple[Instance, Optional[RejectReason]]:
    return parse_instance(Path(path).read_text(encoding="utf-8"), str(path))


def read_witness(path: PathLike) -> tuple[Field, Witness]:
    return parse_witness(Path(path).read_text(encoding="utf-8"), str(path))


def read_cert(path: PathLike) -> CertData:
    return parse_cert(Path(path).read_text(encoding="utf-8"), str(path))

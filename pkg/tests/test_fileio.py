import pytest

from ceq import fileio
from ceq.core import Instance, RejectReason, Tag, Witness
from ceq.errors import FormatError
from ceq.field import field
from ceq.matrix import Mat, Mono, Perm
from ceq.oracle import GenSpec, Planted, generate
from ceq.reduction import rebuild_cert, reduce_instance
from ceq.rng import stream

F2 = field(2)
F9 = field(3, 2)


def sample_instance():
    g = Mat(F9, [[1, 2, 0], [0, 4, 7]])
    h = Mat(F9, [[2, 1, 0], [4, 0, 7]])
    return Instance(F9, g, h, Tag.LCE)


def test_instance_roundtrip_value_and_bytes():
    inst = sample_instance()
    text = fileio.serialize_instance(inst)
    parsed, reject = fileio.parse_instance(text)
    assert parsed == inst and reject is None
    assert fileio.serialize_instance(parsed) == text


def test_instance_with_reject_reason():
    inst = Instance(F2, Mat(F2, [[1, 1]]), Mat(F2, [[1, 0]]), Tag.LCE)
    text = fileio.serialize_instance(inst, RejectReason.PROFILE_MISMATCH)
    assert "reject-reason ProfileMismatch" in text
    parsed, reject = fileio.parse_instance(text)
    assert reject is RejectReason.PROFILE_MISMATCH and parsed == inst


def test_extension_field_line_roundtrip():
    inst = sample_instance()
    text = fileio.serialize_instance(inst)
    assert "field 3^2 mod 1,0,1" in text
    parsed, _ = fileio.parse_instance(text)
    assert parsed.field is F9


def test_witness_roundtrip():
    w = Witness(Mat(F2, [[1, 1], [0, 1]]), Mono(F2, Perm((1, 0, 2)), (1, 1, 1)))
    text = fileio.serialize_witness(F2, w)
    fld, parsed = fileio.parse_witness(text)
    assert fld is F2 and parsed == w
    assert fileio.serialize_witness(fld, parsed) == text
    # permutation serialized 1-based
    assert "perm 2 1 3" in text


def test_cert_roundtrip_through_rebuild():
    rng = stream(8, "certs")
    gen = generate(GenSpec(field(5), 2, 4, Tag.PCE, Planted.YES, seed=5))
    reduced, cert = reduce_instance(gen.instance, Tag.SPCE)
    text = fileio.serialize_cert(cert)
    data = fileio.parse_cert(text)
    rebuilt = rebuild_cert(gen.instance, data)
    assert rebuilt == cert
    assert fileio.serialize_cert(rebuilt) == text


def test_cert_rejected_roundtrip():
    inst = Instance(F2, Mat(F2, [[1, 0]]), Mat(F2, [[1, 1]]), Tag.PCE)
    reduced, cert = reduce_instance(inst, Tag.LCE)
    text = fileio.serialize_cert(cert)
    data = fileio.parse_cert(text)
    assert data.rejected and data.reject_reason is RejectReason.ZERO_COLUMN_COUNT_MISMATCH
    rebuilt = rebuild_cert(inst, data)
    assert rebuilt.rejected and rebuilt.reject_reason == cert.reject_reason


def test_cert_degenerate_roundtrip():
    g = Mat.zeros(F2, 2, 0)
    inst = Instance(F2, g, g, Tag.PCE)
    reduced, cert = reduce_instance(inst, Tag.LCE)
    text = fileio.serialize_cert(cert)
    rebuilt = rebuild_cert(inst, fileio.parse_cert(text))
    assert rebuilt.degenerate


def test_rebuild_cert_cross_checks_instance():
    gen = generate(GenSpec(field(5), 2, 4, Tag.PCE, Planted.YES, seed=5))
    other = generate(GenSpec(field(5), 2, 4, Tag.PCE, Planted.YES, seed=6))
    _, cert = reduce_instance(gen.instance, Tag.LCE)
    data = fileio.parse_cert(fileio.serialize_cert(cert))
    with pytest.raises(FormatError):
        rebuild_cert(other.instance, data)


def test_unknown_version_rejected():
    with pytest.raises(FormatError):
        fileio.parse_instance("%CEQ 2\nfield 2\ntag PCE\nG 0 0\nH 0 0\n")


def test_malformed_inputs_rejected():
    good = fileio.serialize_instance(sample_instance())
    with pytest.raises(FormatError):
        fileio.parse_instance(good + "extra junk\n")
    with pytest.raises(FormatError):
        fileio.parse_instance("%CEQ 1\nfield 4\ntag PCE\nG 0 0\nH 0 0\n")
    with pytest.raises(FormatError):
        fileio.parse_instance("%CEQ 1\nfield 2\ntag WAT\nG 0 0\nH 0 0\n")
    with pytest.raises(FormatError):
        fileio.parse_instance("%CEQ 1\nfield 2\ntag PCE\nG 1 2\n1 2\nH 1 2\n1 0\n")
    with pytest.raises(FormatError):
        fileio.parse_witness("%CEQ 1\nfield 2\nS 1 1\n1\nperm 1 1\ndiag 1 1\n")


def test_degenerate_shapes_roundtrip():
    for k, n in ((0, 3), (2, 0), (0, 0)):
        g = Mat.zeros(F2, k, n)
        inst = Instance(F2, g, g, Tag.PCE)
        text = fileio.serialize_instance(inst)
        parsed, _ = fileio.parse_instance(text)
        assert parsed == inst


def test_generated_files_are_byte_stable():
    gen = generate(GenSpec(field(7), 2, 3, Tag.LCE, Planted.YES, seed=99))
    a = fileio.serialize_instance(gen.instance)
    b = fileio.serialize_instance(gen.instance)
    assert a == b
    assert a.endswith("\n") and "\t" not in a

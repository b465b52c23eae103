import numpy as np
import pytest

from oscindex.certfile import HEADER, load_certificate, read_header, save_certificate
from oscindex.factorization import builtin_certificate_PQUh, constant_certificate, pquh_element, verify_certificate


@pytest.mark.parametrize("h", [0.5, 1.0, 2.0])
def test_roundtrip_verifies(tmp_path, h):
    path = save_certificate(builtin_certificate_PQUh(h), tmp_path / "c.cert")
    cert = load_certificate(path)
    rep = verify_certificate(cert, pquh_element(h), tol=1e-6)
    assert rep.accepted, rep.reasons
    assert cert.form == "e4" and cert.l == 1 and cert.h == h


def test_header(tmp_path):
    path = save_certificate(builtin_certificate_PQUh(1.0), tmp_path / "c.cert")
    assert open(path).readline().strip() == "# " + HEADER
    meta = read_header(path)
    assert meta["form"] == "e4" and meta["h"] == "1.0"
    assert "corrected" in meta["provenance"]


def test_constant_certificate_exact(tmp_path):
    cert = constant_certificate(np.diag([2, 1j]), np.eye(2), [1, 0.25], [0.25, 1], "e3", 1)
    back = load_certificate(save_certificate(cert, tmp_path / "k.cert", n=11))
    t = np.array([-np.inf, -3.0, 0.0, 0.4, np.inf])
    np.testing.assert_allclose(back.w1(t), cert.w1(t), atol=1e-14)
    assert back.h is None


def test_bad_table(tmp_path):
    p = tmp_path / "bad.cert"
    p.write_text("# form: e3\n# l: 1\n# h: none\n0 1 2\n")
    with pytest.raises(ValueError):
        load_certificate(p)


def test_store_persists_builtin(tmp_path):
    builtin_certificate_PQUh(0.5, store=tmp_path)
    assert (tmp_path / "pquh_h0.5.cert").exists()

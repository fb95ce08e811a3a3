import dataclasses
import json

import pytest

from crnaccess import ParamError, SystemParams, load_params, params_from_dict, validate_params

from conftest import PAPER


def test_paper_params_valid():
    assert validate_params(PAPER) is PAPER


def test_minimal_system_valid():
    p = SystemParams(M=1, k=1, lambda_p=1.0, mu_p=1.0, lambda_s=1.0, mu_s=1.0)
    assert validate_params(p) is p
    assert p.M1 == 1 and p.M2 == 1


def test_m1_negative_reported_by_name():
    p = SystemParams(M=2, k=1, lambda_p=1.0, mu_p=1.0, lambda_s=1.0, mu_s=1.0,
                     M_rp=2, M_r2=1)
    with pytest.raises(ParamError, match="M1 negative"):
        validate_params(p)


def test_derived_channel_pools():
    assert PAPER.M1 == 4
    assert PAPER.M2 == 4


@pytest.mark.parametrize("override,message", [
    (dict(M=0), "M < 1"),
    (dict(k=0), "k < 1"),
    (dict(lambda_p=0.0), "lambda_p not positive"),
    (dict(mu_p=-1.0), "mu_p not positive"),
    (dict(lambda_s=0.0), "lambda_s not positive"),
    (dict(mu_s=0.0), "mu_s not positive"),
    (dict(M_rp=-1), "M_rp negative"),
    (dict(M1_prime=-2), "M1_prime negative"),
    (dict(M_r2=-1), "M_r2 negative"),
    (dict(m=0), "m < 1"),
    (dict(n=0), "n < 1"),
    (dict(m=1, n=2), "n > m"),
    (dict(M1_prime=6), "M2 negative"),
    (dict(M=2.5), "M not an integer"),
    (dict(lambda_p="fast"), "lambda_p not a number"),
])
def test_each_invariant_reported(override, message):
    p = dataclasses.replace(PAPER, **override)
    with pytest.raises(ParamError, match=message):
        validate_params(p)


def _paper_doc():
    return {"M": 7, "k": 10, "lambda_p": 0.05, "mu_p": 0.4, "lambda_s": 0.25,
            "mu_s": 0.5, "M_rp": 2, "M1_prime": 1, "M_r2": 1, "m": 2, "n": 1}


def test_json_round_trip(tmp_path):
    path = tmp_path / "params.json"
    path.write_text(json.dumps(_paper_doc()))
    assert load_params(path) == PAPER


def test_json_unknown_key_rejected():
    doc = _paper_doc()
    doc["bandwidth"] = 5
    with pytest.raises(ParamError, match="unknown key 'bandwidth'"):
        params_from_dict(doc)


def test_json_missing_key_rejected():
    doc = _paper_doc()
    del doc["mu_s"]
    with pytest.raises(ParamError, match="missing key 'mu_s'"):
        params_from_dict(doc)


def test_json_optional_flag_accepted():
    doc = _paper_doc()
    doc["su2_min_width_admission"] = False
    p = params_from_dict(doc)
    assert p.su2_min_width_admission is False


def test_invalid_json_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ParamError, match="invalid JSON"):
        load_params(path)

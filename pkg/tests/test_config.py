import json
import math

import pytest

from eitsim.config import ConfigError, default_unit_system, load_memory_config, memory_to_dict
from eitsim.polariton import GAMMA_780, CouplingSchedule, MemoryParams

DOC = {
    "gamma21": 0.01,
    "gamma31": 1.0,
    "delta": 0.2,
    "coupling_strength_sq": 1e4,
    "segments": [
        {"start": 0, "end": 2, "shape": "hold", "omega_start": 1000},
        {"start": 2, "end": 2.5, "shape": "smooth", "omega_start": 1000, "omega_end": 0, "steepness": 1.0},
        {"start": 2.5, "end": 7, "shape": "hold", "omega_start": 0},
        {"start": 7, "end": 7.5, "shape": "linear", "omega_start": 0, "omega_end": 1000},
        {"start": 7.5, "end": 9, "shape": "hold", "omega_start": 1000},
    ],
    "t1": 2.0,
    "t2": 7.0,
}


def si_version(doc):
    out = {k: v * GAMMA_780 for k, v in doc.items() if k in ("gamma21", "gamma31", "delta")}
    out["coupling_strength_sq"] = doc["coupling_strength_sq"] * GAMMA_780**2
    out["segments"] = []
    for seg in doc["segments"]:
        s = dict(seg)
        s["start"], s["end"] = seg["start"] / GAMMA_780, seg["end"] / GAMMA_780
        s["omega_start"] = seg["omega_start"] * GAMMA_780
        if "omega_end" in seg:
            s["omega_end"] = seg["omega_end"] * GAMMA_780
        out["segments"].append(s)
    out["t1"], out["t2"] = doc["t1"] / GAMMA_780, doc["t2"] / GAMMA_780
    out["unit_system"] = "si"
    return out


def test_gamma_document(tmp_path):
    path = tmp_path / "mem.json"
    path.write_text(json.dumps(DOC))
    params, schedule = load_memory_config(path)
    assert params == MemoryParams(0.01, 1.0, 0.2, 0.0, 1e4)
    assert isinstance(schedule, CouplingSchedule)
    assert schedule.storage_time == 5.0


def test_si_document_converts_to_gamma_units():
    p_gamma, s_gamma = load_memory_config(DOC, unit_system="gamma")
    p_si, s_si = load_memory_config(si_version(DOC))
    for key, value in p_gamma.to_dict().items():
        assert math.isclose(p_si.to_dict()[key], value, rel_tol=1e-12, abs_tol=1e-15)
    assert math.isclose(s_si.t1, s_gamma.t1, rel_tol=1e-12)
    assert math.isclose(s_si.storage_time, s_gamma.storage_time, rel_tol=1e-12)
    for t in (0.5, 2.2, 3.0, 7.3, 8.0):
        assert math.isclose(s_si.omega(t), s_gamma.omega(t), rel_tol=1e-9, abs_tol=1e-9)


def test_unit_precedence(monkeypatch):
    doc = {"gamma21": GAMMA_780, "gamma31": GAMMA_780}
    monkeypatch.delenv("EITSIM_UNITS", raising=False)
    assert default_unit_system() == "gamma"
    assert load_memory_config(doc)[0].gamma21 == GAMMA_780
    monkeypatch.setenv("EITSIM_UNITS", "si")
    assert load_memory_config(doc)[0].gamma21 == pytest.approx(1.0)
    # the document beats the environment, the argument beats both
    assert load_memory_config(dict(doc, unit_system="gamma"))[0].gamma21 == GAMMA_780
    assert load_memory_config(dict(doc, unit_system="si"), unit_system="gamma")[0].gamma21 == GAMMA_780


def test_bad_environment_value(monkeypatch):
    monkeypatch.setenv("EITSIM_UNITS", "cgs")
    with pytest.raises(ConfigError):
        default_unit_system()


@pytest.mark.parametrize(
    "doc",
    [
        {"gamma31": 1.0},
        {"gamma21": 0.1, "gamma31": 1.0, "unit_system": "furlongs"},
        {"gamma21": 0.1, "gamma31": 1.0, "segments": []},
        {"gamma21": 0.1, "gamma31": 1.0, "t1": 0, "t2": 1, "segments": [{"start": 0}]},
    ],
)
def test_malformed_documents(doc):
    with pytest.raises(ConfigError):
        load_memory_config(doc)


def test_unreadable_files(tmp_path):
    with pytest.raises(ConfigError):
        load_memory_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_memory_config(bad)


def test_round_trip():
    params, schedule = load_memory_config(DOC)
    again = load_memory_config(json.loads(json.dumps(memory_to_dict(params, schedule))))
    assert again[0] == params
    assert again[1] == schedule
    assert load_memory_config(memory_to_dict(params)) == (params, None)

import pytest

import ct2bc


def test_bit_budgets():
    assert ct2bc.bits_required("subgraph", 6, 3) == 6 * 5
    assert ct2bc.bits_required("subset-sum", 8) == 2 * 8 * 8


def test_gen_is_deterministic():
    a = ct2bc.gen("subset-sum", 8, seed=9)
    assert a == ct2bc.gen("subset-sum", 8, seed=9)
    assert len(a["c0"]) == 8 and all(1 <= e < 2**8 for e in a["c0"] + a["c1"])
    g = ct2bc.gen("subgraph", 5, 2, seed=1)
    assert all(1 <= i < j <= 5 for i, j in g["c0"])


@pytest.mark.parametrize("engine", ["seeded:3", "relativistic-sim", "hash-bootstrap"])
@pytest.mark.parametrize("bit", [0, 1])
def test_honest_session_accepts(engine, bit):
    r = ct2bc.run_local("subgraph", 6, 3, bit=bit, engine=engine, seed=5)
    assert r["verifier"]["phase"] == "ACCEPTED"
    assert r["verifier"]["bit"] == bit
    assert r["committer"]["phase"] == "ACCEPTED"


def test_replay_round_trip():
    r = ct2bc.run_local("subset-sum", 10, bit=1, engine="seeded:7", seed=11)
    again = ct2bc.run_local("subset-sum", 10, bit=1, engine="seeded:7", seed=11)
    assert r["committer"]["transcript"] == again["committer"]["transcript"]
    out = ct2bc.replay(r["verifier"]["transcript"])
    assert out["outgoing_matched"] and out["phase"] == "ACCEPTED"
    with pytest.raises(ct2bc.Ct2bcError):
        ct2bc.replay(r["verifier"]["transcript"][:10])


def test_reports():
    b = ct2bc.binding("subgraph", 6, 1, trials=100, seed=1)
    assert b["estimate"] == 1.0 and b["weak_params"]
    c = ct2bc.concealment("subgraph", 6, 3, trials=200, seed=2)
    assert c == ct2bc.concealment("subgraph", 6, 3, trials=200, seed=2, threads=3)
    assert -0.5 <= c["estimate"] <= 0.5 and c["interval_lo"] <= c["estimate"] <= c["interval_hi"]
    assert ct2bc.abort_bias(1000, seed=3)["report"] == "abort-bias"


def test_errors():
    with pytest.raises(ValueError):
        ct2bc.gen("subgraph", 2, 2)
    with pytest.raises(ct2bc.ResourceGuardError):
        ct2bc.binding("subgraph", 30, 3, trials=1)

import json
import sys
from pathlib import Path

import pytest

from shiftcheck.reporter.manifest import parse
from shiftcheck.reporter.runner import HANDLERS, run, run_command
from shiftcheck.shift_tool import main

FIXTURES = Path(__file__).resolve().parents[1] / "config" / "fixtures"
ENV_NAMES = (
    "SHIFTCHECK_PERIOD_CAP",
    "SHIFTCHECK_WORD_CAP",
    "SHIFTCHECK_SUBSET_CAP",
    "SHIFTCHECK_K_CAP",
    "SHIFTCHECK_MAX_WORKERS",
    "SHIFTCHECK_TIE_BAND",
)


def fixture(name: str) -> str:
    return str(FIXTURES / f"{name}.sft")


@pytest.fixture(autouse=True)
def clean_env(monkeypatch) -> None:
    for name in ENV_NAMES:
        monkeypatch.delenv(name, raising=False)


def run_text(capsys, *args, **kwargs):
    code = run_command(*args, **kwargs)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_resolving_in_s_direction(capsys) -> None:
    code, out, _ = run_text(capsys, fixture("ev"), "resolving", ["EV"], direction="s")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# shiftcheck 0.1.0 P=8 L=12 K_cap=auto subset_cap=4096"
    assert "s-resolving: true" in lines
    assert lines[-2:] == ["holds: true", "exit: 0"]


def test_failed_property_exits_one_with_witness(capsys) -> None:
    code, out, _ = run_text(capsys, fixture("f2"), "resolving", ["CONST"])
    assert code == 1
    assert "u-resolving: false" in out
    assert "witness: " in out


def test_hypothesis_failure_becomes_report(capsys) -> None:
    code, out, _ = run_text(capsys, fixture("f2"), "degree", ["CONST"], summary_json=True)
    assert code == 1
    document = json.loads(out)
    assert document["error_type"] == "NotFiniteToOne"
    assert document["holds"] is False


def test_usage_errors_exit_two(capsys, tmp_path) -> None:
    code, out, err = run_text(capsys, fixture("f2"), "degree", ["NOPE"])
    assert code == 2
    assert out == ""
    assert err.startswith("error:")
    assert run_text(capsys, str(tmp_path / "missing.sft"), "validate", [])[0] == 2
    assert run_text(capsys, fixture("xor"), "fiber", ["XOR"])[0] == 2

    broken = tmp_path / "broken.sft"
    broken.write_text("system S\nsymbols a a\nend\n", encoding="utf-8")
    code, _, err = run_text(capsys, str(broken), "validate", [])
    assert code == 2
    assert "line 2" in err


def test_bad_settings_and_options_exit_two(capsys, monkeypatch) -> None:
    monkeypatch.setenv("SHIFTCHECK_WORD_CAP", "many")
    code, out, err = run_text(capsys, fixture("ev"), "validate", [])
    assert code == 2
    assert out == ""
    assert "SHIFTCHECK_WORD_CAP" in err
    monkeypatch.delenv("SHIFTCHECK_WORD_CAP")
    assert run_text(capsys, fixture("ev"), "cover", ["EV"], relation="beta")[0] == 2
    assert run_text(capsys, fixture("ev"), "resolving", ["EV"], direction="w")[0] == 2


def test_internal_errors_are_not_usage_errors(capsys, monkeypatch) -> None:
    def broken(*args, **kwargs):
        raise ValueError("internal")

    monkeypatch.setitem(HANDLERS, "validate", broken)
    with pytest.raises(ValueError, match="internal"):
        run_command(fixture("ev"), "validate", [])


def test_degree_json(capsys) -> None:
    code, out, _ = run_text(capsys, fixture("xor"), "degree", ["XOR"], summary_json=True)
    assert code == 0
    document = json.loads(out)
    assert (document["K"], document["d"], document["D"]) == (1, 2, 2)
    assert document["permutation"] == "{00->00, 11->11}"
    assert document["u"] == "-"
    assert document["cap_P"] == 8
    assert document["exit"] == 0


def test_degree_text(capsys) -> None:
    code, out, _ = run_text(capsys, fixture("xor"), "degree", ["XOR"])
    assert code == 0
    assert "K=1 d=2 D=2 (P=8)" in out.splitlines()


def test_reports_are_reproducible(capsys) -> None:
    first = run_text(capsys, fixture("ev"), "cover", ["EV"])
    second = run_text(capsys, fixture("ev"), "cover", ["EV"])
    assert first[:2] == second[:2]


def test_validate_fixture(capsys) -> None:
    code, out, _ = run_text(capsys, fixture("xor"), "validate", [])
    assert code == 0
    assert "systems: 2" in out
    assert "codes: 3" in out
    assert "failed: 0" in out


def test_cover_prints_parseable_quotient(capsys) -> None:
    code, out, _ = run_text(capsys, fixture("ev"), "cover", ["EV"])
    assert code == 0
    lines = out.splitlines()
    assert "classes: 4" in lines
    assert "class y+z|y: y+z|y y+z|z" in lines
    assert "forward_closed: true" in lines
    start = lines.index("system EV_alpha")
    quotient = parse("\n".join(lines[start:start + 7]))
    assert len(quotient.code("EV_alpha").domain.symbols) == 4


def test_cover_reports_branching_quotient(capsys) -> None:
    code, out, _ = run_text(capsys, fixture("r1"), "cover", ["R1"])
    assert code == 1
    lines = out.splitlines()
    assert "classes: 7" in lines
    assert "max_component_symbols: 7" in lines
    assert "u-resolving: false" in lines
    assert "forward_closed: false" in lines
    assert lines[-2:] == ["holds: false", "exit: 1"]


def test_cover_with_theta(capsys) -> None:
    code, out, _ = run_text(capsys, fixture("ev"), "cover", ["EV"], relation="theta")
    assert code == 0
    assert "system EV_theta" in out.splitlines()


def test_fischer_report(capsys) -> None:
    code, out, _ = run_text(capsys, fixture("ev"), "fischer", ["EV"])
    lines = out.splitlines()
    assert code == 0
    assert "states: 2" in lines
    assert "edge q1 -1-> q0" in lines
    assert "image_sft: false" in lines
    assert "alpha_agreement: true" in lines


def test_fiber_report(capsys) -> None:
    code, out, _ = run_text(capsys, fixture("xor"), "fiber", ["XOR", "ID_F2"])
    assert code == 0
    assert "symbols: 4" in out.splitlines()


def test_minlift_report(capsys) -> None:
    code, out, _ = run_text(capsys, fixture("split_ev"), "minlift", ["SPLIT", "EV"])
    lines = out.splitlines()
    assert code == 0
    assert "window: 0" in lines
    assert "beta f5 -> z" in lines
    assert "commutes: true" in lines


def test_lift_report_logs_to_stderr(capsys) -> None:
    code, out, err = run_text(capsys, fixture("ev"), "lift", ["EV"], verbose=True)
    assert code == 0
    assert "failures: 0" in out.splitlines()
    assert "node Yt: 3" in out.splitlines()
    assert "[INFO]" in err
    assert "[INFO]" not in out


def test_spectral_report(capsys) -> None:
    code, out, _ = run_text(capsys, fixture("union"), "spectral", ["U"])
    lines = out.splitlines()
    assert code == 0
    assert "components: 4" in lines
    assert "ambiguous: true" in lines
    assert "max_component: U:c0 U:d0" in lines


def test_commute_report(capsys) -> None:
    code, out, _ = run_text(capsys, fixture("xor"), "commute", ["flip_twice"])
    assert code == 0
    assert "commutes: true" in out.splitlines()


def test_run_rejects_unknown_command(xor_manifest) -> None:
    with pytest.raises(ValueError):
        run("explode", xor_manifest)


def test_main_exits_with_report_code(monkeypatch, capsys) -> None:
    monkeypatch.setattr(sys, "argv", ["shiftcheck", "--manifest", fixture("ev"), "resolving", "EV"])
    with pytest.raises(SystemExit) as caught:
        main()
    assert caught.value.code == 0
    assert "u-resolving: true" in capsys.readouterr().out

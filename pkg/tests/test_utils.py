import pytest

from shiftcheck.dynamics.utils import Settings, get_worker_count, load_settings, make_logger, safe_call


def test_load_settings_reads_environment(monkeypatch) -> None:
    monkeypatch.setenv("SHIFTCHECK_PERIOD_CAP", "5")
    monkeypatch.setenv("SHIFTCHECK_K_CAP", "3")
    monkeypatch.setenv("SHIFTCHECK_TIE_BAND", "0.001")
    monkeypatch.setenv("SHIFTCHECK_WORD_CAP", "")
    settings = load_settings()
    assert settings.period_cap == 5
    assert settings.k_cap == 3
    assert settings.tie_band == 0.001
    assert settings.word_cap == 12
    assert settings.caps() == {"P": 5, "L": 12, "K_cap": 3, "subset_cap": 4096}


def test_load_settings_rejects_bad_values(monkeypatch) -> None:
    monkeypatch.setenv("SHIFTCHECK_SUBSET_CAP", "many")
    with pytest.raises(ValueError):
        load_settings()


def test_with_options_validates_keys() -> None:
    settings = Settings().with_options({"P": "4", "workers": "2"})
    assert settings.period_cap == 4
    assert settings.max_workers == 2
    with pytest.raises(ValueError):
        Settings().with_options({"Z": "1"})
    with pytest.raises(ValueError):
        Settings().with_options({"L": "-3"})


def test_worker_count_is_bounded() -> None:
    settings = Settings(max_workers=4)
    assert get_worker_count(settings, 10) == 4
    assert get_worker_count(settings, 2) == 2
    assert get_worker_count(settings, 0) == 1


def test_logger_writes_to_stderr(capsys) -> None:
    log = make_logger(verbose=False)
    log("INFO", "hidden")
    log("WARN", "shown", force=True)
    make_logger(verbose=True, summary_json=True)("INFO", "muted")
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "[WARN] shown" in captured.err
    assert "hidden" not in captured.err
    assert "muted" not in captured.err


def test_safe_call_returns_default(capsys) -> None:
    def explode() -> int:
        raise RuntimeError("boom")

    assert safe_call("explode", explode, -1) == -1
    assert "explode failed: boom" in capsys.readouterr().err
    messages = []
    assert safe_call("explode", explode, 0, lambda level, message, force=False: messages.append(message)) == 0
    assert messages == ["explode failed: boom"]
    assert safe_call("fine", lambda: 7, 0) == 7

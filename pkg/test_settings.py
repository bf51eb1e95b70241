import json
import logging

import pytest

from tropicore.utils.algebra import Semiring
from tropicore.utils.errors import InvalidMatrixError
from tropicore.utils.settings import TOL_ENV, MatrixLibrary, Settings, load_settings


def test_defaults_file_matches_builtin_defaults(monkeypatch):
    monkeypatch.delenv(TOL_ENV, raising=False)
    settings = load_settings()
    assert settings == Settings()
    assert settings.tolerance.build().rel_eps == 1e-9
    assert settings.oracle_tolerance.rel_eps == 1e-6
    assert settings.direct_solve_limit == 64


def test_environment_overrides_tolerance(monkeypatch):
    monkeypatch.setenv(TOL_ENV, "1e-7")
    settings = load_settings()
    assert settings.tolerance.rel_eps == 1e-7
    assert settings.tolerance.abs_eps == 1e-12


@pytest.mark.parametrize("value", ["abc", "-1", "0"])
def test_invalid_environment_override_is_ignored(monkeypatch, caplog, value):
    monkeypatch.setenv(TOL_ENV, value)
    with caplog.at_level(logging.WARNING):
        settings = load_settings()
    assert settings.tolerance.rel_eps == 1e-9
    assert TOL_ENV in caplog.text


def test_missing_settings_file(monkeypatch, tmp_path, caplog):
    monkeypatch.delenv(TOL_ENV, raising=False)
    with caplog.at_level(logging.WARNING):
        settings = load_settings(tmp_path / "absent.json")
    assert settings == Settings()
    assert "not found" in caplog.text


def test_settings_file_is_read(monkeypatch, tmp_path):
    monkeypatch.delenv(TOL_ENV, raising=False)
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"seed": 42, "probes": 10}), encoding="utf-8")
    settings = load_settings(path)
    assert (settings.seed, settings.probes) == (42, 10)
    assert settings.with_rel_eps(1e-4).tolerance.rel_eps == 1e-4
    assert settings.tolerance.rel_eps == 1e-9


def test_library_lists_shipped_matrices(library):
    assert {"example1", "example2", "nilpotent"} <= set(library.names())
    a = library.get_matrix("example2", Semiring.PLUS_TIMES)
    assert a.n == 4
    assert a.semiring is Semiring.PLUS_TIMES


def test_library_unknown_name(library):
    with pytest.raises(InvalidMatrixError) as exc:
        library.get_matrix("missing")
    assert exc.value.exit_code == 3


def test_library_skips_malformed_files_and_reloads(tmp_path, caplog):
    (tmp_path / "good.json").write_text(json.dumps({"n": 1, "entries": [[2.0]]}), encoding="utf-8")
    (tmp_path / "broken.json").write_text(json.dumps({"n": 2, "entries": [[1.0]]}), encoding="utf-8")
    with caplog.at_level(logging.WARNING):
        library = MatrixLibrary(tmp_path)
    assert library.names() == ["good"]
    assert "broken.json" in caplog.text

    (tmp_path / "extra.json").write_text(json.dumps({"n": 1, "entries": [[0.0]]}), encoding="utf-8")
    assert library.names() == ["good"]
    library.reload()
    assert library.names() == ["extra", "good"]

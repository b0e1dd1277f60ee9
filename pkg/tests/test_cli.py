"""Flag handling, file execution, imports, and exit codes."""

from pathlib import Path

import pytest

from cattkernel import cli as X
from cattkernel import nbe as N
from cattkernel import surface as R
from cattkernel.nbe import EvalConfig
from cattkernel.pasting import OperationSet
from cattkernel.typecheck import CheckError, Signature

MONOIDAL = Path(__file__).resolve().parent.parent / "catt" / "monoidal.catt"


# ---------------------------------------------------------------------------
# flags


def test_default_configuration():
    opts = X.parse_args([])
    assert opts.config == N.WEAK
    assert opts.ops is OperationSet.REGULAR
    assert opts.keep_implicits is False and opts.files == ()


def test_preset_flags():
    assert X.parse_args(["--su"]).config == N.SU
    assert X.parse_args(["--sua"]).config == N.SUA


def test_flags_apply_left_to_right():
    opts = X.parse_args(["--su", "--insertion", "none"])
    assert opts.config == EvalConfig(dr=True, ecr=True, insertion="none")
    assert X.parse_args(["--dr", "on", "--sua"]).config == N.SUA


def test_individual_toggles():
    opts = X.parse_args(["--dr", "on", "--ecr", "off"])
    assert opts.config == EvalConfig(dr=True, ecr=False, insertion="none")
    assert X.parse_args(["--insertion", "full"]).config.insertion == "full"


def test_ops_flag():
    assert X.parse_args(["--ops", "groupoidal"]).ops is OperationSet.GROUPOIDAL


def test_keep_implicits_and_files():
    opts = X.parse_args(["--keep-implicits", "a.catt", "b.catt"])
    assert opts.keep_implicits is True and opts.files == ("a.catt", "b.catt")


def test_oracle_trace_flag(tmp_path, capsys):
    f = tmp_path / "a.catt"
    f.write_text("def one [f] = comp\nnormalise one(f) in [f]\n")
    assert X.main(["--su", "--oracle", str(f)]) == 0
    out = capsys.readouterr().out
    assert "oracle:" in out and "[dr]" in out


def test_bad_flag_values():
    with pytest.raises(X.UsageError):
        X.parse_args(["--dr", "maybe"])
    with pytest.raises(X.UsageError):
        X.parse_args(["--insertion", "sometimes"])
    with pytest.raises(X.UsageError):
        X.parse_args(["--ops", "lax"])
    with pytest.raises(X.UsageError):
        X.parse_args(["--frobnicate"])
    with pytest.raises(X.UsageError):
        X.parse_args(["--dr"])


def test_usage_error_exit_code(capsys):
    assert X.main(["--frobnicate"]) == 2
    assert "frobnicate" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# running files


def test_running_a_file(tmp_path, capsys):
    f = tmp_path / "a.catt"
    f.write_text("def one [f] = comp\nassert one(f) = comp[f] in [f]\n")
    assert X.main([str(f)]) == 0
    out = capsys.readouterr().out
    assert "defined one" in out and "assertion holds" in out


def test_type_error_gives_exit_code_one(tmp_path, capsys):
    f = tmp_path / "a.catt"
    f.write_text("def bad (x : *) = y\n")
    assert X.main([str(f)]) == 1
    assert "error" in capsys.readouterr().err


def test_parse_error_gives_exit_code_one(tmp_path, capsys):
    f = tmp_path / "a.catt"
    f.write_text("def = ]\n")
    assert X.main([str(f)]) == 1
    assert "error" in capsys.readouterr().err


def test_missing_file_gives_exit_code_one(capsys):
    assert X.main(["no-such-file.catt"]) == 1
    assert "cannot open" in capsys.readouterr().err


def test_shipped_file_loads_under_every_preset(capsys):
    for flags in ([], ["--su"], ["--sua"]):
        assert X.main(flags + [str(MONOIDAL)]) == 0
        out = capsys.readouterr().out
        assert out.count("assertion holds") == 2


# ---------------------------------------------------------------------------
# imports


def test_import_resolves_relative_to_importing_file(tmp_path, capsys):
    lib_dir = tmp_path / "lib"
    lib_dir.mkdir()
    (lib_dir / "base.catt").write_text("def one [f] = comp\n")
    main_file = lib_dir / "main.catt"
    main_file.write_text("import base.catt\nsize one(f) in [f]\n")
    assert X.main([str(main_file)]) == 0
    assert "size: 1" in capsys.readouterr().out


def test_import_falls_back_to_working_directory(tmp_path, monkeypatch, capsys):
    (tmp_path / "base.catt").write_text("def one [f] = comp\n")
    other = tmp_path / "sub"
    other.mkdir()
    main_file = other / "main.catt"
    main_file.write_text("import base.catt\n")
    monkeypatch.chdir(tmp_path)
    assert X.main([str(main_file)]) == 0


def test_import_cycle_detected(tmp_path):
    a = tmp_path / "a.catt"
    b = tmp_path / "b.catt"
    a.write_text("import b.catt\n")
    b.write_text("import a.catt\n")
    state = X.SessionState()
    with pytest.raises(CheckError, match="cycle"):
        X.run_import(state, str(a), None)


def test_missing_import_reported(tmp_path):
    state = X.SessionState()
    with pytest.raises(CheckError, match="cannot find"):
        X.run_import(state, "nope.catt", tmp_path)


def test_running_a_file_equals_importing_it():
    st_run = X.SessionState()
    X.run_import(st_run, str(MONOIDAL), None)
    st_file = X.SessionState()
    text = MONOIDAL.read_text()
    for cmd in R.parse(text):
        X.run_command(st_file, cmd, MONOIDAL.parent)
    assert st_run.sig.entries.keys() == st_file.sig.entries.keys()
    for k in st_run.sig.entries:
        assert st_run.sig.entries[k] == st_file.sig.entries[k]


# ---------------------------------------------------------------------------
# the interactive loop


def test_repl_reports_errors_and_continues(monkeypatch, capsys):
    lines = iter(["def one [f] = comp", "def bad (x : *) = y", ""])

    def fake_input(prompt=""):
        try:
            return next(lines)
        except StopIteration:
            raise EOFError

    monkeypatch.setattr("builtins.input", fake_input)
    state = X.SessionState()
    assert X.repl(state) == 1
    captured = capsys.readouterr()
    assert "defined one" in captured.out
    assert "error" in captured.err
    assert "one" in state.sig.entries

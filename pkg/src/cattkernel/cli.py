"""Command execution, file loading, the REPL, and the command line.

A failing command reports an error and leaves the signature unchanged;
running a file is the same as importing it into a fresh session.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import core as C
from . import flat as F
from . import nbe as N
from . import oracle as O
from . import surface as R
from .nbe import EvalConfig
from .pasting import OperationSet
from .surface import ParseError
from .typecheck import CheckError, Checker, SigEntry, Signature


@dataclass
class SessionState:
    sig: Signature = field(default_factory=Signature)
    keep_implicits: bool = False
    oracle_trace: bool = False
    import_stack: tuple = ()


def run_command(
    state: SessionState, cmd: R.Command, base_dir: Optional[Path] = None
) -> list[str]:
    ck = Checker(state.sig)
    if isinstance(cmd, R.DefCmd):
        if cmd.ctx is None:
            ctx, term, ty = ck.infer(cmd.term)
        else:
            ctx = ck.elab_ctx(cmd.ctx)
            term, ty = ck.check(ctx, cmd.term)
            if cmd.ty is not None:
                _, want = ck.check_ty(ctx, cmd.ty)
                if ty != want:
                    raise CheckError(
                        f"{cmd.name} does not have the stated type", cmd.ty.span
                    )
        state.sig.entries[cmd.name] = SigEntry(ctx, term, ty)
        return [f"defined {cmd.name}"]
    if isinstance(cmd, R.NormaliseCmd):
        ctx = ck.elab_ctx(cmd.ctx)
        term, ty = ck.check(ctx, cmd.term)
        nf = ck.nf(ctx, term)
        names = _display_names(ctx)
        shown = R.pretty(
            C.to_raw(N.quote_tm(nf), names, state.keep_implicits)
        )
        shown_ty = R.pretty(
            C.to_raw(N.quote_ty(ty), names, state.keep_implicits)
        )
        out = [f"normal form: {shown}", f"of type: {shown_ty}"]
        if state.oracle_trace:
            out.extend(_oracle_trace(state, ctx, term))
        return out
    if isinstance(cmd, R.AssertCmd):
        ctx = ck.elab_ctx(cmd.ctx)
        lhs, lty = ck.check(ctx, cmd.lhs)
        rhs, rty = ck.check(ctx, cmd.rhs)
        if lty != rty:
            raise CheckError("the two sides have different types", cmd.span)
        if ck.nf(ctx, lhs) != ck.nf(ctx, rhs):
            raise CheckError("the terms are not equal", cmd.span)
        return ["assertion holds"]
    if isinstance(cmd, R.SizeCmd):
        ctx = ck.elab_ctx(cmd.ctx)
        term, _ = ck.check(ctx, cmd.term)
        return [f"size: {N.size_tm(ck.nf(ctx, term))}"]
    if isinstance(cmd, R.ImportCmd):
        return run_import(state, cmd.path, base_dir)
    raise CheckError("unknown command", cmd.span)


def _oracle_trace(state: SessionState, ctx, term) -> list[str]:
    from .typecheck import TreeCtx

    amb = ctx.tree if isinstance(ctx, TreeCtx) else len(ctx)
    rules = (
        O.RuleSet.SUA_PRIME
        if state.sig.config.insertion == "full"
        else O.RuleSet.SU_PRIME
    )
    t = C.flatten_tm(term, amb)
    lines = [f"oracle: {F.show_tm(t)}"]
    while True:
        steps = O.step(t, rules)
        if not steps:
            return lines
        t = steps[0].term
        lines.append(f"oracle: {F.show_tm(t)}  [{steps[0].rule}]")


def _display_names(ctx) -> C.Names:
    from .typecheck import TreeCtx

    if isinstance(ctx, TreeCtx):
        return C.Names(ctx.names)
    return C.Names(ctx.names)


def resolve_import(path: str, base_dir: Optional[Path]) -> Path:
    candidates = []
    if base_dir is not None:
        candidates.append(base_dir / path)
    candidates.append(Path.cwd() / path)
    for c in candidates:
        if c.is_file():
            return c.resolve()
    raise CheckError(f"cannot find {path!r}")


def run_import(
    state: SessionState, path: str, base_dir: Optional[Path]
) -> list[str]:
    resolved = resolve_import(path, base_dir)
    if str(resolved) in state.import_stack:
        raise CheckError(f"import cycle through {path!r}")
    text = resolved.read_text()
    cmds = R.parse(text, source=str(resolved))
    out = [f"importing {path}"]
    prev = state.import_stack
    state.import_stack = prev + (str(resolved),)
    try:
        for cmd in cmds:
            out.extend(run_command(state, cmd, resolved.parent))
    finally:
        state.import_stack = prev
    return out


# ---------------------------------------------------------------------------
# configuration flags


USAGE = """usage: catt-kernel [FLAGS] [FILE ...]

flags (applied left to right):
  --su                  strictly unital preset
  --sua                 strictly unital and associative preset
  --dr {on,off}         disc removal
  --ecr {on,off}        endo-coherence removal
  --insertion {none,id,full}
  --ops {regular,groupoidal}
  --keep-implicits      display all labelling arguments
"""


class UsageError(Exception):
    pass


@dataclass
class Options:
    config: EvalConfig = N.WEAK
    ops: OperationSet = OperationSet.REGULAR
    keep_implicits: bool = False
    oracle_trace: bool = False
    files: tuple = ()


def parse_args(argv: list[str]) -> Options:
    config = N.WEAK
    ops = OperationSet.REGULAR
    keep = False
    oracle = False
    files: list[str] = []
    i = 0

    def onoff(value: str) -> bool:
        if value not in ("on", "off"):
            raise UsageError(f"expected on or off, got {value!r}")
        return value == "on"

    while i < len(argv):
        arg = argv[i]
        if arg == "--su":
            config = N.SU
        elif arg == "--sua":
            config = N.SUA
        elif arg in ("--dr", "--ecr", "--insertion", "--ops"):
            if i + 1 >= len(argv):
                raise UsageError(f"{arg} needs a value")
            value = argv[i + 1]
            i += 1
            if arg == "--dr":
                config = EvalConfig(onoff(value), config.ecr, config.insertion)
            elif arg == "--ecr":
                config = EvalConfig(config.dr, onoff(value), config.insertion)
            elif arg == "--insertion":
                if value not in ("none", "id", "full"):
                    raise UsageError(f"bad insertion mode {value!r}")
                config = EvalConfig(config.dr, config.ecr, value)
            else:
                try:
                    ops = OperationSet(value)
                except ValueError:
                    raise UsageError(f"bad operation set {value!r}")
        elif arg == "--keep-implicits":
            keep = True
        elif arg == "--oracle":
            oracle = True
        elif arg in ("-h", "--help"):
            raise UsageError(USAGE)
        elif arg.startswith("-"):
            raise UsageError(f"unknown flag {arg!r}")
        else:
            files.append(arg)
        i += 1
    return Options(config, ops, keep, oracle, tuple(files))


def run_text(state: SessionState, text: str, source: Optional[str] = None):
    base = Path(source).parent if source else None
    for cmd in R.parse(text, source=source):
        for line in run_command(state, cmd, base):
            print(line)


def repl(state: SessionState) -> int:
    status = 0
    while True:
        try:
            line = input("catt> ")
        except EOFError:
            print()
            return status
        if not line.strip():
            continue
        try:
            run_text(state, line)
        except (ParseError, CheckError) as e:
            print(f"error: {e}", file=sys.stderr)
            status = 1
    return status


def main(argv: Optional[list[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        opts = parse_args(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return 2
    state = SessionState(
        sig=Signature(config=opts.config, ops=opts.ops),
        keep_implicits=opts.keep_implicits,
        oracle_trace=opts.oracle_trace,
    )
    if not opts.files:
        return repl(state)
    for f in opts.files:
        path = Path(f)
        if not path.is_file():
            print(f"error: cannot open {f!r}", file=sys.stderr)
            return 1
        try:
            run_text(state, path.read_text(), source=str(path))
        except (ParseError, CheckError) as e:
            print(f"error: {e}", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: check, repl, extract, auto, serve."""

from __future__ import annotations

import json
import sys

import click

from .errors import (
    NanoproverError,
    NotClassicallyValid,
    ParseError,
    SessionError,
)
from .extract import DIALECTS, extract_function
from .kernel import CalculusMode, check_derivation, EMPTY_ENV
from .session import (
    LINEAR,
    RANDOM_ACCESS,
    create_session,
    run_script,
    session_step,
)
from .surface import parse_formula, pretty
from .translate import classical_auto, glivenko_prove

# Script-level modes; the Hilbert calculus only checks flat axiom/MP
# sequences (kernel.hilbert_check), not tactic scripts.
_MODES = {
    "intuitionistic": CalculusMode.INTUITIONISTIC,
    "classical": CalculusMode.CLASSICAL,
}


def _emit(payload: dict, fmt: str, human: str) -> None:
    if fmt == "json":
        click.echo(json.dumps(payload, indent=2))
    else:
        click.echo(human)


@click.group(invoke_without_command=True)
@click.option("--serve", "serve_port", type=int, default=None, metavar="PORT",
              help="Start the session server on PORT and block.")
@click.pass_context
def main(ctx, serve_port):
    """nanoprover: a miniature dual-mode proof assistant."""
    if serve_port is not None:
        _serve(serve_port)
        return
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


def _serve(port: int, host: str = "127.0.0.1"):
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(sorted(_MODES)), default="intuitionistic",
              help="Base calculus mode (file pragmas may override).")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def check(file, mode, fmt):
    """Batch-check FILE; exit 0 iff every stated proof reaches Qed."""
    text = open(file, encoding="utf-8").read()
    try:
        s = run_script(text, _MODES[mode])
    except (SessionError, ParseError) as e:
        idx = getattr(e, "item_index", None)
        payload = {"ok": False, "file": file,
                   "diagnostics": [{"item_index": idx, "message": str(e)}]}
        _emit(payload, fmt, f"{file}: FAILED at item {idx}: {e}")
        sys.exit(1)
    thms = list(s.current.theorems)
    payload = {"ok": True, "file": file, "theorems": thms,
               "items": s.item_count, "diagnostics": []}
    _emit(payload, fmt, f"{file}: OK ({s.item_count} items, "
          f"{len(thms)} theorem(s): {', '.join(thms) or 'none'})")


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(sorted(_MODES)), default="intuitionistic")
@click.option("--navigation", type=click.Choice([LINEAR, RANDOM_ACCESS]),
              default=LINEAR)
def repl(file, mode, navigation):
    """Step through FILE interactively: n(ext) / b(ack) / g(oto) N / q(uit)."""
    text = open(file, encoding="utf-8").read()
    try:
        s = create_session(text, navigation, _MODES[mode])
    except ParseError as e:
        click.echo(f"parse error: {e}")
        sys.exit(1)

    def show():
        st = s.current
        click.echo(f"-- item {s.cursor}/{s.item_count} "
                   f"[{st.mode.value}]" + (f" proving {st.proof.name}" if st.proof else ""))
        if st.message:
            click.echo(st.message)

    show()
    while True:
        try:
            cmd = click.prompt("nanoprover", default="n", show_default=False)
        except (EOFError, click.Abort):
            break
        cmd = cmd.strip()
        try:
            if cmd in ("n", "next", ""):
                s = session_step(s, "forward")
            elif cmd in ("b", "back"):
                s = session_step(s, "backward")
            elif cmd.startswith("g"):
                s = session_step(s, "run_to", index=int(cmd.split()[1]))
            elif cmd in ("q", "quit"):
                break
            else:
                click.echo("commands: n(ext), b(ack), g(oto) N, q(uit)")
                continue
        except (SessionError, ParseError) as e:
            click.echo(f"error: {e}")
            continue
        show()


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.argument("name")
@click.option("--dialect", type=click.Choice(DIALECTS), default="lazy-functional")
@click.option("--mode", type=click.Choice(sorted(_MODES)), default="intuitionistic")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Also write the extraction to this file.")
def extract(file, name, dialect, mode, fmt, out):
    """Run FILE, then extract definition NAME in the chosen dialect."""
    text = open(file, encoding="utf-8").read()
    try:
        s = run_script(text, _MODES[mode])
        source = extract_function(s.current.env, name, dialect)
    except NanoproverError as e:
        _emit({"ok": False, "diagnostics": [{"message": str(e)}]}, fmt,
              f"extraction failed: {e}")
        sys.exit(1)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(source)
    _emit({"ok": True, "name": name, "dialect": dialect, "source": source},
          fmt, source.rstrip("\n"))


@main.command()
@click.argument("formula")
@click.option("--mode", type=click.Choice(["intuitionistic", "classical"]),
              default="classical")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def auto(formula, mode, fmt):
    """Decide FORMULA automatically (Glivenko-backed in classical mode)."""
    try:
        phi = parse_formula(formula)
    except NanoproverError as e:
        _emit({"ok": False, "diagnostics": [{"message": str(e)}]}, fmt,
              f"parse error: {e}")
        sys.exit(1)
    try:
        if mode == "classical":
            thm = classical_auto(phi)
            check_derivation(thm.derivation, CalculusMode.CLASSICAL, EMPTY_ENV)
            verdict, nodes = "classically provable", thm.derivation.size()
        else:
            from . import g4ip
            from .kernel import elaborate
            dd = g4ip.decide((), elaborate(phi))
            if dd is None:
                raise NotClassicallyValid("not intuitionistically provable")
            check_derivation(dd, CalculusMode.INTUITIONISTIC, EMPTY_ENV)
            verdict, nodes = "intuitionistically provable", dd.size()
    except (NotClassicallyValid, NanoproverError) as e:
        _emit({"ok": False, "formula": pretty(phi), "provable": False,
               "diagnostics": [{"message": str(e)}]},
              fmt, f"{pretty(phi)}: NOT provable ({e})")
        sys.exit(1)
    _emit({"ok": True, "formula": pretty(phi), "provable": True,
           "mode": mode, "derivation_nodes": nodes},
          fmt, f"{pretty(phi)}: {verdict} ({nodes} derivation nodes)")


@main.command()
@click.argument("port", type=int, default=8457)
@click.option("--host", default="127.0.0.1")
def serve(port, host):
    """Start the JSON session server for the browser IDE."""
    _serve(port, host)


if __name__ == "__main__":
    main()

"""Command-line prover and proof checker.

    bproof check <file.bprf>                 re-verify a serialized proof
    bproof prove <goal> <script> [--emit f]  run a tactic script on a goal
    bproof repl                              interactive proving session
    bproof selftest [--depth N]              enumerative binder-law oracle

Exit codes: 0 success, 1 proof failure, 2 environment failure (I/O, parse).
``BPROOF_COLOR=0|1`` forces ANSI color off or on (default: only on a tty).
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import binder
from .enumeration import broken_lift, run_selftest
from .kernel import InvalidStep, KernelError, Sequent, Theorem, check
from .syntax import (
    DecodeError,
    ParseError,
    ScopeTable,
    decode_proof,
    encode_proof,
    parse_sequent,
    print_sequent,
    print_term,
)
from .tactics import (
    FocusStep,
    ScriptFailed,
    TacticError,
    TacticStep,
    parse_script,
    parse_tactic_line,
    run_script,
)

__all__ = ["main", "entry"]


class _Style:
    def __init__(self, enabled: bool):
        self.enabled = enabled

    def _wrap(self, code: str, text: str) -> str:
        return f"\x1b[{code}m{text}\x1b[0m" if self.enabled else text

    def good(self, text: str) -> str:
        return self._wrap("32", text)

    def bad(self, text: str) -> str:
        return self._wrap("31", text)

    def head(self, text: str) -> str:
        return self._wrap("1", text)


def _style() -> _Style:
    env = os.environ.get("BPROOF_COLOR")
    if env == "0":
        return _Style(False)
    if env == "1":
        return _Style(True)
    return _Style(sys.stdout.isatty())


def cmd_check(path: str) -> int:
    st = _style()
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        print(st.bad(f"error: cannot read {path}: {exc}"), file=sys.stderr)
        return 2
    try:
        tree = decode_proof(data)
    except DecodeError as exc:
        print(st.bad(f"error: {exc}"), file=sys.stderr)
        return 2
    try:
        thm = check(tree)
    except InvalidStep as exc:
        print(st.bad(f"rejected: {exc}"))
        return 1
    print(st.good("checked: ") + print_sequent(thm.sequent))
    return 0


def cmd_prove(goal_path: str, script_path: str, emit: str | None = None) -> int:
    st = _style()
    try:
        with open(goal_path, "r", encoding="utf-8") as fh:
            goal_text = fh.read()
        with open(script_path, "r", encoding="utf-8") as fh:
            script_text = fh.read()
    except OSError as exc:
        print(st.bad(f"error: {exc}"), file=sys.stderr)
        return 2
    try:
        goal, scope = parse_sequent(goal_text)
        script, scope = parse_script(script_text, scope)
    except (ParseError, TacticError) as exc:
        print(st.bad(f"error: {exc}"), file=sys.stderr)
        return 2
    try:
        thm = run_script(script, goal)
    except ScriptFailed as exc:
        print(st.bad(str(exc)))
        for n, sub in enumerate(exc.remaining, start=1):
            print(f"  subgoal {n}: {print_sequent(sub, scope)}")
        return 1
    print(st.good("proved: ") + print_sequent(thm.sequent, scope))
    if emit is not None:
        try:
            with open(emit, "wb") as fh:
                fh.write(encode_proof(thm.tree))
        except OSError as exc:
            print(st.bad(f"error: cannot write {emit}: {exc}"), file=sys.stderr)
            return 2
        print(f"emitted: {emit}")
    return 0


_REPL_HELP = """commands:
  goal <h1 ; h2 |- p>   start proving a sequent (hypotheses optional)
  apply <tactic>        apply a tactic to the first subgoal
  focus <n>             bring subgoal n to the front
  subgoals              list open subgoals
  undo                  revert the last goal/apply/focus
  emit <path>           write the finished proof to a .bprf file
  qed                   verify closure and print the theorem
  help, quit"""


class _Session:
    """Goal stack plus a builder closing over pending justifications."""

    def __init__(self):
        self.history: list[tuple] = []
        self.goals: list[Sequent] | None = None
        self.build = None
        self.scope: ScopeTable | None = None
        self.root: Sequent | None = None

    def snapshot(self):
        self.history.append((self.goals, self.build, self.scope, self.root))

    def undo(self) -> bool:
        if not self.history:
            return False
        self.goals, self.build, self.scope, self.root = self.history.pop()
        return True

    def theorem(self) -> Theorem:
        thm = self.build(())
        if thm.sequent != self.root:
            raise KernelError("justification closed a different sequent")
        return thm


def cmd_repl(stdin=None, stdout=None) -> int:
    st = _style()
    stdin = stdin or sys.stdin
    out = stdout or sys.stdout

    def say(text: str = "") -> None:
        print(text, file=out)

    ses = _Session()
    say("bproof interactive prover; 'help' lists commands")
    while True:
        try:
            print("> ", end="", file=out, flush=True)
            line = stdin.readline()
        except KeyboardInterrupt:
            say()
            return 0
        if not line:
            return 0
        line = line.strip()
        if not line:
            continue
        cmd, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if cmd in ("quit", "exit"):
                return 0
            if cmd == "help":
                say(_REPL_HELP)
            elif cmd == "goal":
                sequent, scope = parse_sequent(rest)
                ses.snapshot()
                ses.goals = [sequent]
                ses.build = lambda thms: thms[0]
                ses.scope = scope
                ses.root = sequent
                say("goal: " + print_sequent(sequent, scope))
            elif cmd == "apply":
                if ses.goals is None:
                    say(st.bad("no goal; use 'goal <sequent>' first"))
                    continue
                if not ses.goals:
                    say(st.bad("no open subgoals; 'qed' to finish"))
                    continue
                step, scope = parse_tactic_line(rest, ses.scope)
                if isinstance(step, FocusStep):
                    say(st.bad("use the 'focus' command"))
                    continue
                subs, justify = step.tactic(ses.goals[0])
                ses.snapshot()
                ses.scope = scope
                old_build = ses.build
                k = len(subs)

                def build(thms, _j=justify, _b=old_build, _k=k):
                    thms = tuple(thms)
                    return _b((_j(thms[:_k]),) + thms[_k:])

                ses.goals = subs + ses.goals[1:]
                ses.build = build
                if ses.goals:
                    say(f"{len(ses.goals)} subgoal(s); first: " + print_sequent(ses.goals[0], ses.scope))
                else:
                    say(st.good("all subgoals closed; 'qed' to finish"))
            elif cmd == "focus":
                if ses.goals is None or not rest.isdigit():
                    say(st.bad("usage: focus <n>"))
                    continue
                n = int(rest)
                if not 1 <= n <= len(ses.goals):
                    say(st.bad(f"focus: no subgoal {n}"))
                    continue
                ses.snapshot()
                i = n - 1
                goals = ses.goals
                ses.goals = [goals[i]] + goals[:i] + goals[i + 1 :]
                old_build = ses.build

                def build(thms, _b=old_build, _i=i):
                    thms = tuple(thms)
                    return _b(thms[1 : _i + 1] + (thms[0],) + thms[_i + 1 :])

                ses.build = build
                say("focused: " + print_sequent(ses.goals[0], ses.scope))
            elif cmd == "subgoals":
                if ses.goals is None:
                    say("no goal set")
                elif not ses.goals:
                    say("no open subgoals")
                else:
                    for n, sub in enumerate(ses.goals, start=1):
                        say(f"  {n}. {print_sequent(sub, ses.scope)}")
            elif cmd == "undo":
                say("undone" if ses.undo() else st.bad("nothing to undo"))
            elif cmd == "emit":
                if ses.goals is None or ses.goals:
                    say(st.bad("emit: open subgoals remain"))
                    continue
                thm = ses.theorem()
                with open(rest, "wb") as fh:
                    fh.write(encode_proof(thm.tree))
                say(f"emitted: {rest}")
            elif cmd == "qed":
                if ses.goals is None:
                    say(st.bad("no goal set"))
                elif ses.goals:
                    say(st.bad(f"qed: {len(ses.goals)} subgoal(s) remain"))
                else:
                    thm = ses.theorem()
                    say(st.good("theorem: ") + print_sequent(thm.sequent, ses.scope))
            else:
                say(st.bad(f"unknown command {cmd!r}; 'help' lists commands"))
        except (ParseError, TacticError, KernelError, OSError) as exc:
            say(st.bad(f"error: {exc}"))
    return 0


def cmd_selftest(depth: int = 3, mutate_lift: bool = False) -> int:
    st = _style()
    if depth < 1 or depth > 4:
        print(st.bad("error: selftest depth must be between 1 and 4"), file=sys.stderr)
        return 2
    lift_fn = broken_lift if mutate_lift else binder.lift
    started = time.time()
    reports = run_selftest(depth, lift_fn=lift_fn)
    ok = True
    total = 0
    for r in reports:
        total += r.checked
        mark = st.good("PASS") if r.ok else st.bad("FAIL")
        print(f"{mark} {r.name}: {r.checked} checks")
        for ce in r.counterexamples:
            print(st.bad(f"     counterexample: {ce}"))
        ok = ok and r.ok
    print(f"{total} checks at depth <= {depth} in {time.time() - started:.1f}s")
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bproof", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="re-verify a serialized proof file")
    p_check.add_argument("file", help="a .bprf proof file")

    p_prove = sub.add_parser("prove", help="run a tactic script against a goal file")
    p_prove.add_argument("goal", help="file holding one sequent")
    p_prove.add_argument("script", help="a .bscript tactic script")
    p_prove.add_argument("--emit", metavar="PATH", help="write the proof tree on success")

    sub.add_parser("repl", help="interactive proving session")

    p_self = sub.add_parser("selftest", help="run the enumerative law suite")
    p_self.add_argument("--depth", type=int, default=3, help="term depth bound (default 3)")
    p_self.add_argument(
        "--mutate-lift",
        action="store_true",
        help="run against a deliberately broken lift (must fail)",
    )

    args = parser.parse_args(argv)
    if args.command == "check":
        return cmd_check(args.file)
    if args.command == "prove":
        return cmd_prove(args.goal, args.script, args.emit)
    if args.command == "repl":
        return cmd_repl()
    if args.command == "selftest":
        return cmd_selftest(args.depth, args.mutate_lift)
    return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()

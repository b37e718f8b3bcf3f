"""Interactive refinement session with undo.

Every successful operator is pushed onto the history together with the
property set it replaced, so ``undo`` restores the previous state exactly
and ``history`` prints a script that replays the session.
"""
from __future__ import annotations

import cmd
import shlex
import sys
from pathlib import Path

from .errors import ReliaMisError
from .galois import abstract_model, check_roundtrip_props
from .io import dump_model_file, dump_script_file, export_dot, parse_model_file
from .mis import evaluate_at, evaluate_reliability
from .ops import apply_script, format_op, parse_op
from .order import generalizes, top
from .props import check_well_formed, normalize


class Session(cmd.Cmd):
    prompt = "reliamis> "
    intro = "Type 'help' for commands."

    def __init__(self, initial=None, stdin=None, stdout=None):
        super().__init__(stdin=stdin, stdout=stdout)
        if stdin is not None:
            # scripted input: no line editing and no prompt in the transcript
            self.use_rawinput = False
            self.prompt = ""
        self.current = initial
        self.base = initial
        self.history = []  # (op, previous property set)

    # -- helpers --------------------------------------------------------------

    def say(self, text=""):
        self.stdout.write(f"{text}\n")

    def error(self, exc):
        category = getattr(exc, "category", "io" if isinstance(exc, OSError) else "invalid-argument")
        self.say(f"error: {category}: {exc}")

    def _need_state(self):
        if self.current is None:
            self.say("error: no-model: load a model first (or use 'top')")
            return False
        return True

    def _fresh(self, p):
        self.current = self.base = p
        self.history = []

    def emptyline(self):
        pass

    def default(self, line):
        self.say(f"error: unknown-command: {line.split()[0]}")

    # -- commands -------------------------------------------------------------

    def do_load(self, arg):
        """load <file>: start a new session from a model file."""
        try:
            self._fresh(parse_model_file(Path(arg.strip()).read_text()))
        except (OSError, ReliaMisError) as exc:
            self.error(exc)
            return
        self.do_show("")

    def do_top(self, arg):
        """top [name]: start from the most general one-component system."""
        try:
            self._fresh(top(arg.strip() or "c"))
        except ValueError as exc:
            self.error(exc)
            return
        self.do_show("")

    def do_show(self, arg):
        """show: print the current property set."""
        if self._need_state():
            p = self.current
            for c in p.sorted_components():
                self.say(f"  R({c}) >= {p.bound(c)}")
            for d in p.sorted_deps():
                self.say(f"  {d}")

    def do_wf(self, arg):
        """wf: check the well-formedness rules."""
        if not self._need_state():
            return
        report = check_well_formed(self.current)
        if report.ok:
            self.say("well-formed")
        for v in report.violations:
            self.say(f"  {v.rule}: {v.message}")

    def do_ops(self, arg):
        """ops <op> [; <op> ...]: apply operators, e.g. 'ops split c1 c1 c2'."""
        if not self._need_state():
            return
        pending = []
        try:
            for part in arg.split(";"):
                if part.strip():
                    pending.append(parse_op(part))
            state = self.current
            steps = []
            for op in pending:
                new = apply_script([op], state)
                steps.append((op, state))
                state = new
        except (ValueError, ReliaMisError) as exc:
            self.error(exc)
            return
        self.history.extend(steps)
        self.current = state
        for op, _ in steps:
            self.say(f"applied {format_op(op)}")

    def do_undo(self, arg):
        """undo: revert the last operator."""
        if not self.history:
            self.say("nothing to undo")
            return
        op, prev = self.history.pop()
        self.current = prev
        self.say(f"undid {format_op(op)}")

    def do_history(self, arg):
        """history: print the session as a replayable script file."""
        self.stdout.write(dump_script_file([op for op, _ in self.history]))

    def do_eval(self, arg):
        """eval [name=p ...]: analytic reliability, optionally at other component values."""
        if not self._need_state():
            return
        try:
            m = abstract_model(self.current)
            if arg.strip():
                assignment = dict(m.components)
                for item in shlex.split(arg):
                    name, _, value = item.partition("=")
                    if name not in assignment:
                        raise ValueError(f"unknown component {name!r}")
                    assignment[name] = value
                result = evaluate_at(m, assignment)
            else:
                result = evaluate_reliability(m)
        except (ValueError, ReliaMisError) as exc:
            self.error(exc)
            return
        self.say(f"R(sys) = {result}")

    def do_abstract(self, arg):
        """abstract: show the states and failure transitions of the abstracted chain."""
        if not self._need_state():
            return
        try:
            m = abstract_model(self.current)
        except ReliaMisError as exc:
            self.error(exc)
            return
        self.say("states: " + " ".join(m.label(s) for s in m.states))
        for (c, s), mv in sorted(m.all_moves().items(), key=lambda kv: (m.index(kv[0][1]), kv[0][0])):
            self.say(f"  {m.label(s)} --{c}--> {m.label(mv.target)}")

    def do_dot(self, arg):
        """dot <path>: write the abstracted chain as a DOT graph."""
        if not self._need_state() or not arg.strip():
            return
        try:
            Path(arg.strip()).write_text(export_dot(abstract_model(self.current)))
        except (OSError, ReliaMisError) as exc:
            self.error(exc)
            return
        self.say(f"wrote {arg.strip()}")

    def do_roundtrip(self, arg):
        """roundtrip: check p <= gamma(alpha(p))."""
        if not self._need_state():
            return
        try:
            rep = check_roundtrip_props(self.current)
        except ReliaMisError as exc:
            self.error(exc)
            return
        self.say(f"{'holds' if rep.holds else 'FAILS'}: {rep.relation_checked}")

    def do_leq(self, arg):
        """leq <file> [depth]: search for a generalization script to the model in <file>."""
        if not self._need_state():
            return
        parts = arg.split()
        if not parts:
            self.say("error: usage: leq <file> [depth]")
            return
        try:
            q = parse_model_file(Path(parts[0]).read_text())
            depth = int(parts[1]) if len(parts) > 1 else 3
            v = generalizes(self.current, q, depth)
        except (ValueError, OSError, ReliaMisError) as exc:
            self.error(exc)
            return
        self.say(f"{v.relation.value} (depth {v.depth_searched})")
        for op in v.witness or ():
            self.say(f"  {format_op(op)}")

    def do_save(self, arg):
        """save <path>: write the current property set."""
        if not self._need_state() or not arg.strip():
            return
        try:
            Path(arg.strip()).write_text(dump_model_file(normalize(self.current)))
        except OSError as exc:
            self.error(exc)
            return
        self.say(f"wrote {arg.strip()}")

    def do_quit(self, arg):
        """quit: leave the session."""
        return True

    do_EOF = do_quit


def run(initial=None, stdin=None, stdout=None) -> Session:
    session = Session(initial, stdin=stdin, stdout=stdout or sys.stdout)
    session.cmdloop("" if stdin is not None else None)
    return session

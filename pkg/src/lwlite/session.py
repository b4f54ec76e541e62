"""One inference session: env, fresh counters and evaluated values,
threaded across files or REPL inputs."""

from __future__ import annotations

from dataclasses import dataclass

from . import syntax as S
from .core import Frame, builtin_env, builtin_values, eval_program
from .infer import Inferencer, ProgramResult, infer_program
from .types import Scheme, Supply, normalize_print, type_vars


@dataclass
class SessionConfig:
    record_jects: bool = False


def is_ground(sc: Scheme) -> bool:
    return not sc.constraints and not type_vars(sc.body)


class Session:
    def __init__(self, config: SessionConfig | None = None):
        self.config = config or SessionConfig()
        self.supply = Supply()
        self.inferencer = Inferencer(self.supply, self.config.record_jects)
        self.env = builtin_env(self.supply)
        self.values: Frame | None = builtin_values()

    @property
    def jects(self):
        return self.inferencer.jects

    def check(self, source: str) -> ProgramResult:
        """Parse and infer ``source``; successful items extend the session env."""
        program = S.parse_program(source)
        return self.check_program(program)

    def check_program(self, program: S.Program) -> ProgramResult:
        res = infer_program(self.env, program, self.inferencer)
        self.env = res.env
        return res

    def run(self, res: ProgramResult) -> list[tuple[str, object, Scheme]]:
        """Evaluate the core of ``res``; returns (name, value, scheme) per item."""
        out = []
        schemes = iter(res.bindings)

        def seen(name, value):
            b = next(schemes)
            out.append((b.name, value, b.scheme))

        self.values = eval_program(res.core, self.values, seen)
        return out

    def type_of(self, source: str) -> Scheme:
        e = S.parse_expr(source)
        _, sc, _, _ = self.inferencer.infer_binding(self.env, "plain", "it", e)
        return sc

    def core_of(self, source: str) -> S.Expr:
        e = S.parse_expr(source)
        _, _, core, _ = self.inferencer.infer_binding(self.env, "plain", "it", e)
        return core

    def show_type(self, source: str) -> str:
        return normalize_print(self.type_of(source))

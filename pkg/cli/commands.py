# Verifier - the commands behind the qwp command line

import logging
import os
from typing import Any, Dict, List, Optional, Tuple

from config.settings import RunConfig
from qpl.elaborator import Elaboration, Elaborator
from qpl.examples import (BELL, bell_input_state, bell_observable, build_bell_stabilizer,
                          coin_postcondition, coin_source, coin_state, grover_postcondition,
                          grover_source, uniform_state)
from qpl.parser import format_program, parse
from quantum.codec import load_channel, load_superop, load_tuple, tuple_to_file
from quantum.domain import (DensityState, MatrixTuple, ObservableTuple, PredicateTuple,
                            apply_super, expectation, satisfies, validate_channel,
                            validate_observable, validate_predicate, validate_state,
                            validate_superoperator)
from quantum.protocol import ObjectKind, TripleReport, ValidationReport, Verdict
from utils.errors import InvalidPredicate, InvalidState, InvalidThreshold, OutOfRange
from utils.helpers import digest, dump_json, format_matrix, load_from_file, save_to_file
from wp.engine import duality_check, wp_observable, wp_super

logger = logging.getLogger(__name__)

EXAMPLES = ("grover", "coin", "bell")


class Verifier:
    """
    Runs one verifier command per call against a fixed run configuration.
    Every command returns a JSON-ready dictionary.
    """

    def __init__(self, config: Optional[RunConfig] = None):
        """
        Initialize the verifier

        Args:
            config: Tolerances, seed and output options; defaults when omitted
        """
        self.config = config or RunConfig()
        self.elaborator = Elaborator(tol=self.config.truncation_tol, max_iter=self.config.max_iter)

    # Loading

    def load_program(self, program_path: str) -> Elaboration:
        """Parse and elaborate a .qpl file."""
        program = parse(load_from_file(program_path))
        elaborated = self.elaborator.elaborate(program)
        logger.info("elaborated %s: %s -> %s", program_path,
                    elaborated.superop.in_sig, elaborated.superop.out_sig)
        return elaborated

    def load_post(self, post_path: str) -> MatrixTuple:
        """Postcondition tuple; observables when the run is configured for them."""
        if self.config.observable:
            post = load_tuple(post_path, ObservableTuple)
            report = validate_observable(post, tol=self.config.psd_tol)
        else:
            post = load_tuple(post_path, PredicateTuple)
            report = validate_predicate(post, tol=self.config.psd_tol)
        if not report.valid:
            raise InvalidPredicate(f"{post_path}: {report.violations[0].message}")
        return post

    def load_state(self, state_path: str) -> DensityState:
        state = load_tuple(state_path, DensityState)
        report = validate_state(state, tol=self.config.psd_tol)
        if not report.valid:
            raise InvalidState(f"{state_path}: {report.violations[0].message}")
        return state

    def _precondition(self, elaborated: Elaboration, post: MatrixTuple) -> MatrixTuple:
        if isinstance(post, ObservableTuple):
            return wp_observable(elaborated.superop, post, tol=self.config.psd_tol)
        return wp_super(elaborated.superop, post, tol=self.config.psd_tol)

    # Commands

    def cmd_wp(self, program_path: str, post_path: str) -> Dict[str, Any]:
        """
        Weakest precondition of a postcondition file under a program.

        Returns:
            Serialized precondition tuple
        """
        elaborated = self.load_program(program_path)
        post = self.load_post(post_path)
        pre = self._precondition(elaborated, post)
        return tuple_to_file(pre).model_dump(mode="json")

    def cmd_run(self, program_path: str, state_path: str) -> Dict[str, Any]:
        """
        Forward run of a program on a state file.

        Returns:
            Serialized output state plus its entry traces
        """
        elaborated = self.load_program(program_path)
        state = self.load_state(state_path)
        out = apply_super(elaborated.superop, state)
        result = tuple_to_file(out).model_dump(mode="json")
        result["traces"] = out.traces()
        return result

    def cmd_check(self, program_path: str, post_path: str, state_path: str,
                  threshold: float) -> TripleReport:
        """
        Check the triple state |=_r wp(program)(post) and attach a duality residual.

        Raises:
            InvalidThreshold: If threshold is outside [0, 1]
        """
        if not (0.0 <= threshold <= 1.0):
            raise InvalidThreshold(f"threshold must lie in [0, 1], got {threshold}")
        elaborated = self.load_program(program_path)
        post = self.load_post(post_path)
        state = self.load_state(state_path)
        pre = self._precondition(elaborated, post)
        value = expectation(state, pre)
        passed = satisfies(state, pre, threshold)
        duality = duality_check(elaborated.superop, trials=self.config.duality_trials,
                                seed=self.config.seed)
        logger.info("check %s: expectation %.12g against %g -> %s", program_path, value, threshold,
                    "pass" if passed else "fail")
        return TripleReport(
            program=program_path,
            postcondition_digest=digest(tuple_to_file(post).model_dump(mode="json")),
            precondition=tuple_to_file(pre),
            expectation=value,
            threshold=threshold,
            verdict=Verdict.PASS if passed else Verdict.FAIL,
            duality_residual=duality.max_residual,
            duality_trials=duality.trials,
            seed=self.config.seed,
        )

    def cmd_validate(self, object_path: str, kind: ObjectKind) -> ValidationReport:
        """Validation report for a state, predicate, observable, channel or superoperator file."""
        kind = ObjectKind(kind)
        tol = self.config.psd_tol
        if kind == ObjectKind.STATE:
            return validate_state(load_tuple(object_path, DensityState), tol=tol)
        if kind == ObjectKind.PREDICATE:
            return validate_predicate(load_tuple(object_path, PredicateTuple), tol=tol)
        if kind == ObjectKind.OBSERVABLE:
            return validate_observable(load_tuple(object_path, ObservableTuple), tol=tol)
        if kind == ObjectKind.CHANNEL:
            return validate_channel(load_channel(object_path), tol=tol)
        return validate_superoperator(load_superop(object_path), tol=tol)

    def cmd_example(self, name: str, out_dir: str = ".", n: int = 2, s: int = 0,
                    register_size: int = 1) -> Dict[str, Any]:
        """
        Write the canonical program and companion files of an example.

        Returns:
            The example name and the written paths
        """
        files = example_files(name, n=n, s=s, register_size=register_size)
        written = []
        for filename, content in files:
            path = os.path.join(out_dir, filename)
            save_to_file(content, path)
            written.append(path)
        logger.info("wrote %d files for example %s", len(written), name)
        return {"example": name, "files": written}


def _tuple_json(t: MatrixTuple) -> str:
    return dump_json(tuple_to_file(t).model_dump(mode="json"))


def example_files(name: str, n: int = 2, s: int = 0, register_size: int = 1) -> List[Tuple[str, str]]:
    """
    (filename, content) pairs of an example; contents are canonical and byte-stable.

    Raises:
        OutOfRange: Unknown example or parameters out of range
    """
    if name == "grover":
        return [
            (f"grover{n}.qpl", format_program(parse(grover_source(n, s)))),
            (f"grover{n}_post.json", _tuple_json(grover_postcondition(n, s))),
            (f"grover{n}_state.json", _tuple_json(uniform_state(n))),
        ]
    if name == "coin":
        return [
            ("coin.qpl", format_program(parse(coin_source(register_size)))),
            ("coin_post.json", _tuple_json(coin_postcondition(register_size))),
            ("coin_state.json", _tuple_json(coin_state(register_size))),
        ]
    if name == "bell":
        stabilizer = build_bell_stabilizer()
        zz, xx = stabilizer.generators
        return [
            ("bell.qpl", format_program(parse(BELL))),
            ("bell_post_zz.json", _tuple_json(bell_observable(zz))),
            ("bell_post_xx.json", _tuple_json(bell_observable(xx))),
            ("bell_state.json", _tuple_json(bell_input_state())),
        ]
    raise OutOfRange(f"unknown example {name!r}, expected one of {', '.join(EXAMPLES)}")


# Text rendering

def render_tuple_text(data: Dict[str, Any]) -> str:
    """Six-significant-digit rendering of a serialized tuple (and traces, when present)."""
    lines = [f"signature [{', '.join(str(d) for d in data['sig'])}]"]
    for k, entry in enumerate(data["entries"]):
        values = [complex(re, im) for re, im in entry["entries"]]
        matrix = [values[r * entry["cols"]:(r + 1) * entry["cols"]] for r in range(entry["rows"])]
        lines.append(f"entry {k}:")
        lines.append(format_matrix(matrix))
    if "traces" in data:
        lines.append("traces: " + ", ".join(f"{t:.6g}" for t in data["traces"]))
    return "\n".join(lines) + "\n"


def render_report_text(report: ValidationReport) -> str:
    lines = [f"{'pass' if report.passed else 'fail'} (max residual {report.max_residual:.6g}, "
             f"{report.trials} trials)"]
    for v in report.violations:
        witness = "" if v.witness is None else f" [witness {v.witness:.6g}]"
        lines.append(f"  {v.code}: {v.message}{witness}")
    return "\n".join(lines) + "\n"


def render_triple_text(report: TripleReport) -> str:
    lines = [
        f"program: {report.program}",
        f"postcondition: {report.postcondition_digest}",
        f"expectation: {report.expectation:.6g}",
        f"threshold: {report.threshold:.6g}",
        f"verdict: {report.verdict.value}",
        f"duality residual: {report.duality_residual:.3e} ({report.duality_trials} trials, seed {report.seed})",
        "precondition:",
    ]
    return "\n".join(lines) + "\n" + render_tuple_text(report.precondition.model_dump(mode="json"))

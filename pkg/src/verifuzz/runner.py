"""Target execution: run one input under resource limits, capture streams,
classify the outcome, parse managed-runtime stack traces, and ingest the
file-based coverage channel.

Crash policy: a run is a crash iff its exit code is in the configured
crash set, it was killed by a signal, or stderr contains a parseable trace
block. A nonzero exit with diagnostic-only stderr is a clean error, never
bucketed. Precedence: timeout > crash > clean_error > verified.
"""

from __future__ import annotations

import logging
import os
import re
import signal
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)

STREAM_LIMIT = 1 << 20  # 1 MiB per stream
KILL_GRACE_SECONDS = 0.5
DEFAULT_CRASH_EXITS = frozenset({70, 101, 134})
DEFAULT_COVERAGE_ENV = "AVALANCHE_COV"


@dataclass(frozen=True)
class TargetSpec:
    """How to invoke the target verifier on one input file."""

    command: tuple[str, ...]  # must contain the "{input}" placeholder once
    timeout: float = 10.0
    crash_exit_codes: frozenset[int] = DEFAULT_CRASH_EXITS
    coverage_file_env: str | None = DEFAULT_COVERAGE_ENV
    skip_backend_args: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        placeholders = sum(1 for a in self.command if "{input}" in a)
        if placeholders != 1:
            raise ValueError("command must contain the {input} placeholder exactly once")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    def argv(self, input_path: str) -> list[str]:
        return [
            a.replace("{input}", input_path) for a in self.command
        ] + list(self.skip_backend_args)

    def to_dict(self) -> dict:
        return {
            "command": list(self.command),
            "timeout": self.timeout,
            "crash_exit_codes": sorted(self.crash_exit_codes),
            "coverage_file_env": self.coverage_file_env,
            "skip_backend_args": list(self.skip_backend_args),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TargetSpec":
        return cls(
            command=tuple(d["command"]),
            timeout=float(d.get("timeout", 10.0)),
            crash_exit_codes=frozenset(d.get("crash_exit_codes", DEFAULT_CRASH_EXITS)),
            coverage_file_env=d.get("coverage_file_env", DEFAULT_COVERAGE_ENV),
            skip_backend_args=tuple(d.get("skip_backend_args", ())),
        )


@dataclass(frozen=True)
class StackFrame:
    class_name: str
    method_name: str
    file_name: str | None = None
    line: int | None = None

    def render(self) -> str:
        if self.file_name is None:
            return f"\tat {self.class_name}.{self.method_name}(Unknown Source)"
        return f"\tat {self.class_name}.{self.method_name}({self.file_name}:{self.line})"


@dataclass(frozen=True)
class StackTrace:
    exception_name: str
    message: str | None
    frames: tuple[StackFrame, ...]

    def render(self) -> str:
        head = self.exception_name
        if self.message is not None:
            head += f": {self.message}"
        return "\n".join([head, *(f.render() for f in self.frames)]) + "\n"


@dataclass
class Exit:
    kind: str  # code | signal | timeout
    value: int | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value}


@dataclass
class RunOutcome:
    exit: Exit
    stdout: str
    stderr: str
    duration_ms: int
    classification: str  # verified | clean_error | crash | timeout | resource_limit
    trace: StackTrace | None = None
    counters: frozenset[int] = frozenset()
    new_counters: int = 0
    stdout_truncated: bool = False
    stderr_truncated: bool = False


_FRAME_RE = re.compile(
    r"^\s*at\s+(?P<path>[A-Za-z_$][\w$.]*)\.(?P<method>[A-Za-z_$<][\w$<>]*)"
    r"\((?:(?P<file>[^():]+):(?P<line>\d+)|Unknown Source)\)\s*$"
)
_HEADER_RE = re.compile(
    r'^(?:Exception in thread "[^"]*"\s+)?'
    r"(?P<name>[A-Za-z_$][\w$.]*)(?::\s?(?P<msg>.*))?$"
)
_CAUSED_RE = re.compile(r"^Caused by:\s+(?P<name>[A-Za-z_$][\w$.]*)(?::\s?(?P<msg>.*))?$")
_ELLIPSIS_RE = re.compile(r"^\s*\.\.\.\s+\d+\s+more\s*$")


def parse_stack_trace(stderr: str) -> StackTrace | None:
    """Parse the first dotted-frame trace block out of a stderr stream.

    Recognizes ``Name(: message)?`` headers followed by one or more
    ``at pkg.Class.method(File:line)`` / ``(Unknown Source)`` lines;
    ``Caused by:`` blocks contribute their frames in order. Returns None
    when nothing matches (absence is not an error).
    """
    lines = stderr.splitlines()
    for i, line in enumerate(lines):
        header = _HEADER_RE.match(line.strip())
        if header is None:
            continue
        if i + 1 >= len(lines) or _frame_of(lines[i + 1]) is None:
            continue
        frames: list[StackFrame] = []
        j = i + 1
        while j < len(lines):
            frame = _frame_of(lines[j])
            if frame is not None:
                frames.append(frame)
                j += 1
                continue
            if _ELLIPSIS_RE.match(lines[j]):
                j += 1
                continue
            caused = _CAUSED_RE.match(lines[j].strip())
            if caused is not None and j + 1 < len(lines) and _frame_of(lines[j + 1]) is not None:
                j += 1
                continue
            break
        msg = header.group("msg")
        return StackTrace(header.group("name"), msg, tuple(frames))
    return None


def _frame_of(line: str) -> StackFrame | None:
    # path is greedy and method admits no dots, so path ends up holding the
    # full dotted class and method the trailing component.
    m = _FRAME_RE.match(line)
    if m is None:
        return None
    cls, method = m.group("path"), m.group("method")
    if m.group("file") is not None:
        return StackFrame(cls, method, m.group("file"), int(m.group("line")))
    return StackFrame(cls, method)


def _classification(exit: Exit, has_trace: bool, spec: TargetSpec) -> str:
    if exit.kind == "timeout":
        return "timeout"
    if exit.kind == "signal":
        return "crash"
    if has_trace or exit.value in spec.crash_exit_codes:
        return "crash"
    if exit.value != 0:
        return "clean_error"
    return "verified"


def classify(exit: Exit, stderr: str, spec: TargetSpec) -> str:
    """Classification with precedence timeout > crash > clean_error > verified."""
    return _classification(exit, parse_stack_trace(stderr) is not None, spec)


def read_coverage_file(path: str | Path) -> set[int]:
    """Read one decimal counter id per line; malformed lines are skipped."""
    covered: set[int] = set()
    try:
        with open(path, "r", encoding="utf-8", errors="replace") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text:
                    continue
                try:
                    covered.add(int(text))
                except ValueError:
                    log.warning("%s:%d: skipping malformed counter id %r", path, lineno, text)
    except FileNotFoundError:
        return set()
    except OSError as e:
        log.warning("cannot read coverage file %s: %s", path, e)
        return set()
    return covered


def _truncate(text: str) -> tuple[str, bool]:
    if len(text) > STREAM_LIMIT:
        return text[:STREAM_LIMIT], True
    return text, False


def run_once(spec: TargetSpec, data: bytes, work_dir: str | Path | None = None) -> RunOutcome:
    """Execute the target once on ``data``.

    The input goes into a fresh temp file substituted for {input}; a unique
    coverage path is exported when the spec names a coverage env var. The
    whole process group is killed on timeout, so no descendants survive.
    """
    with tempfile.TemporaryDirectory(prefix="vfz-run-", dir=work_dir) as tmp:
        input_path = os.path.join(tmp, "input.bin")
        with open(input_path, "wb") as fh:
            fh.write(data)
        env = os.environ.copy()
        cov_path = None
        if spec.coverage_file_env:
            cov_path = os.path.join(tmp, "coverage.txt")
            env[spec.coverage_file_env] = cov_path

        argv = spec.argv(input_path)
        started = time.monotonic()
        try:
            proc = subprocess.Popen(
                argv,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                env=env,
                start_new_session=True,
            )
        except FileNotFoundError as e:
            raise TargetMissingError(f"target binary not found: {argv[0]}") from e

        timed_out = False
        try:
            out_b, err_b = proc.communicate(timeout=spec.timeout)
        except subprocess.TimeoutExpired:
            timed_out = True
            _kill_process_group(proc)
            try:
                out_b, err_b = proc.communicate(timeout=KILL_GRACE_SECONDS)
            except subprocess.TimeoutExpired:
                proc.kill()
                out_b, err_b = proc.communicate()
        duration_ms = int((time.monotonic() - started) * 1000)

        stdout, out_trunc = _truncate(out_b.decode("utf-8", errors="replace"))
        stderr, err_trunc = _truncate(err_b.decode("utf-8", errors="replace"))

        if timed_out:
            exit = Exit("timeout")
        elif proc.returncode is not None and proc.returncode < 0:
            exit = Exit("signal", -proc.returncode)
        else:
            exit = Exit("code", proc.returncode)

        trace = parse_stack_trace(stderr)
        classification = _classification(exit, trace is not None, spec)
        counters = frozenset(read_coverage_file(cov_path)) if cov_path else frozenset()
        return RunOutcome(
            exit=exit,
            stdout=stdout,
            stderr=stderr,
            duration_ms=duration_ms,
            classification=classification,
            trace=trace,
            counters=counters,
            stdout_truncated=out_trunc,
            stderr_truncated=err_trunc,
        )


class TargetMissingError(RuntimeError):
    """The configured target binary does not exist: a configuration error,
    surfaced before the campaign loop ever starts."""


def _kill_process_group(proc: subprocess.Popen) -> None:
    try:
        pgid = os.getpgid(proc.pid)
    except ProcessLookupError:
        return
    try:
        os.killpg(pgid, signal.SIGTERM)
        time.sleep(0.05)
        os.killpg(pgid, signal.SIGKILL)
    except ProcessLookupError:
        pass


def probe_version(spec: TargetSpec) -> str:
    """Ask the target for a version string (best effort)."""
    argv = [a for a in spec.command if "{input}" not in a] + ["--version"]
    try:
        proc = subprocess.run(
            argv, capture_output=True, text=True, timeout=min(spec.timeout, 10.0)
        )
    except (OSError, subprocess.TimeoutExpired):
        return "unknown"
    text = (proc.stdout or proc.stderr).strip()
    return text.splitlines()[0] if text else "unknown"

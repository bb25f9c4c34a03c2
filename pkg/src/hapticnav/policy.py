"""Scene summary to navigation command.

The preferred route is a language model: the summary is rendered as a
short obstacle description, sent to a chat-completion endpoint, and the
reply is parsed for a command keyword. When the model is unreachable, too
slow, or answers nonsense, a deterministic rule table takes over so the
wearer always gets a command.
"""
from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

import httpx

from .errors import InputError
from .perception import Column, GridCell, Row
from .scene import ConsolidatedObject, SceneSummary


class Sensitivity(Enum):
    """How much of the scene the wearer wants described.

    LOW reports immediate hazards only, MEDIUM adds everything at ground
    level (the bottom row), HIGH reports every consolidated object.
    """

    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


class NavCommand(Enum):
    LEFT = "Left"
    RIGHT = "Right"
    FORWARD = "Forward"
    STOP = "Stop"


class DecisionSource(Enum):
    LLM = "llm"
    FALLBACK = "fallback"


class ParseError(ValueError):
    """Model reply does not contain exactly one command keyword."""


class LlmTransportError(RuntimeError):
    """The model could not be reached or did not return usable text."""


class DecisionError(RuntimeError):
    """No command could be produced and fallback is disabled."""


@dataclass(frozen=True)
class NavPrompt:
    system_text: str
    scene_text: str
    sensitivity: Sensitivity

    def sha256(self) -> str:
        digest = hashlib.sha256()
        digest.update(self.system_text.encode("utf-8"))
        digest.update(b"\n")
        digest.update(self.scene_text.encode("utf-8"))
        return digest.hexdigest()


@dataclass
class PolicyConfig:
    """Knobs for decide().

    api_key_env names an environment variable; the key itself never
    appears in configuration files or command lines.
    """

    sensitivity: Sensitivity = Sensitivity.MEDIUM
    llm_endpoint: str = ""
    llm_model: str = ""
    timeout_ms: float = 3000.0
    fallback_enabled: bool = True
    api_key_env: str = "HAPTICNAV_LLM_API_KEY"


@dataclass(frozen=True)
class Decision:
    command: NavCommand
    source: DecisionSource
    latency_ms: float
    raw_response: str | None = None


_TEMPLATE_CACHE: dict[str, str] = {}


def _load_template() -> str:
    if "system" not in _TEMPLATE_CACHE:
        ref = resources.files("hapticnav.data").joinpath("prompt_template.txt")
        _TEMPLATE_CACHE["system"] = ref.read_text(encoding="utf-8").strip()
    return _TEMPLATE_CACHE["system"]


def _describe(obj: ConsolidatedObject) -> str:
    where = obj.cell.label()
    if obj.distance_m is None:
        line = f"{obj.label} at {where}, distance unknown"
    else:
        line = f"{obj.label} at {where}, {obj.distance_m:.1f} m"
    if obj.immediate_hazard:
        line += " [HAZARD]"
    return line


def filter_objects(
    summary: SceneSummary, sensitivity: Sensitivity
) -> tuple[ConsolidatedObject, ...]:
    """Objects the given sensitivity level reports, original order kept."""
    if sensitivity is Sensitivity.HIGH:
        return summary.objects
    if sensitivity is Sensitivity.MEDIUM:
        return tuple(
            o for o in summary.objects if o.cell.row is Row.BOTTOM or o.immediate_hazard
        )
    return tuple(o for o in summary.objects if o.immediate_hazard)


def build_prompt(summary: SceneSummary, sensitivity: Sensitivity) -> NavPrompt:
    """Render a summary into the prompt sent to the model.

    Objects keep their summary order (priority descending), so the most
    important obstacle is always mentioned first.
    """
    reported = filter_objects(summary, sensitivity)
    if reported:
        lines = ["Obstacles:"] + [f"- {_describe(o)}" for o in reported]
        scene_text = "\n".join(lines)
    else:
        scene_text = "No obstacles detected."
    return NavPrompt(
        system_text=_load_template(),
        scene_text=scene_text,
        sensitivity=sensitivity,
    )


# Keyword aliases accepted in model replies.
_COMMAND_WORDS = {
    "left": NavCommand.LEFT,
    "right": NavCommand.RIGHT,
    "forward": NavCommand.FORWARD,
    "straight": NavCommand.FORWARD,
    "ahead": NavCommand.FORWARD,
    "stop": NavCommand.STOP,
    "halt": NavCommand.STOP,
    "wait": NavCommand.STOP,
}


def parse_command(text: str) -> NavCommand:
    """Extract the command from free-form model text.

    The reply must mention exactly one distinct command (aliases of the
    same command are fine); zero or several distinct commands raise
    ParseError.
    """
    words = "".join(c if c.isalpha() else " " for c in text.lower()).split()
    found = {_COMMAND_WORDS[w] for w in words if w in _COMMAND_WORDS}
    if len(found) == 1:
        return found.pop()
    if not found:
        raise ParseError(f"no command keyword in reply: {text!r}")
    names = ", ".join(sorted(c.value for c in found))
    raise ParseError(f"ambiguous reply mentions {names}: {text!r}")


# Side cost used by the fallback rule: sum of 1/distance over ground-level
# objects on that side, with unknown distances counted as 2 m.
_UNKNOWN_DISTANCE_M = 2.0
_BLOCKED_COST = 2.0


def _side_cost(summary: SceneSummary, column: Column) -> float:
    cell = GridCell(Row.BOTTOM, column)
    return sum(
        1.0 / (o.distance_m if o.distance_m is not None else _UNKNOWN_DISTANCE_M)
        for o in summary.objects
        if o.cell == cell
    )


def fallback_policy(summary: SceneSummary) -> NavCommand:
    """Deterministic command rule used when the model route fails.

    No hazard: Forward. With a hazard: sidestep toward the cheaper side
    (ties go Left), or Stop when both sides are already crowded.
    """
    if not summary.hazards():
        return NavCommand.FORWARD
    left = _side_cost(summary, Column.LEFT)
    right = _side_cost(summary, Column.RIGHT)
    if left >= _BLOCKED_COST and right >= _BLOCKED_COST:
        return NavCommand.STOP
    if right < left:
        return NavCommand.RIGHT
    return NavCommand.LEFT


def decide(summary: SceneSummary, config: PolicyConfig, client=None) -> Decision:
    """Produce a command, preferring the model client when given.

    client is anything with complete(prompt: NavPrompt) -> str. On
    transport or parse failure the fallback rule answers instead; with
    fallback disabled the failure escalates as DecisionError.
    """
    started = time.perf_counter()

    def elapsed_ms() -> float:
        return (time.perf_counter() - started) * 1000.0

    if client is not None:
        prompt = build_prompt(summary, config.sensitivity)
        try:
            text = client.complete(prompt)
            return Decision(parse_command(text), DecisionSource.LLM, elapsed_ms(), text)
        except (LlmTransportError, ParseError) as exc:
            if not config.fallback_enabled:
                raise DecisionError(f"model route failed: {exc}") from exc
            return Decision(fallback_policy(summary), DecisionSource.FALLBACK, elapsed_ms())
    if not config.fallback_enabled:
        raise DecisionError("no model client and fallback disabled")
    return Decision(fallback_policy(summary), DecisionSource.FALLBACK, elapsed_ms())


class ChatCompletionClient:
    """Minimal chat-completions HTTP client."""

    def __init__(self, config: PolicyConfig):
        if not config.llm_endpoint:
            raise InputError("llm_endpoint is required for the HTTP client")
        self._config = config

    def complete(self, prompt: NavPrompt) -> str:
        import os

        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self._config.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload = {
            "model": self._config.llm_model,
            "messages": [
                {"role": "system", "content": prompt.system_text},
                {"role": "user", "content": prompt.scene_text},
            ],
        }
        try:
            response = httpx.post(
                self._config.llm_endpoint,
                json=payload,
                headers=headers,
                timeout=self._config.timeout_ms / 1000.0,
            )
            response.raise_for_status()
            body = response.json()
            text = body["choices"][0]["message"]["content"]
        except (httpx.HTTPError, KeyError, IndexError, TypeError, ValueError) as exc:
            raise LlmTransportError(f"chat completion failed: {exc}") from exc
        if not isinstance(text, str):
            raise LlmTransportError(f"reply content is not text: {text!r}")
        return text


class TranscriptClient:
    """Replays recorded model replies in order.

    Each entry is {"response": str} with an optional "prompt_sha256" that,
    when present, must match the prompt being answered. Running past the
    end or hitting a digest mismatch raises LlmTransportError.
    """

    def __init__(self, entries: list[dict]):
        for i, entry in enumerate(entries):
            if "response" not in entry:
                raise InputError(f"transcript entry {i} lacks a response")
        self._entries = list(entries)
        self._cursor = 0

    @property
    def remaining(self) -> int:
        return len(self._entries) - self._cursor

    def complete(self, prompt: NavPrompt) -> str:
        if self._cursor >= len(self._entries):
            raise LlmTransportError("transcript exhausted")
        entry = self._entries[self._cursor]
        self._cursor += 1
        expected = entry.get("prompt_sha256")
        if expected is not None and expected != prompt.sha256():
            raise LlmTransportError(
                f"transcript entry {self._cursor - 1} answers a different prompt"
            )
        return str(entry["response"])


def load_transcript(path: str | Path) -> TranscriptClient:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        entries = raw["responses"] if isinstance(raw, dict) else raw
        if not isinstance(entries, list):
            raise InputError("transcript must be a list or have a responses list")
        return TranscriptClient(entries)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"bad transcript file {path}: {exc}") from exc

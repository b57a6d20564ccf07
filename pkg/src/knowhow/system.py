"""Epistemic transition systems, histories, profiles, and their relations.

A system is a set of states, a per-agent partition of the states into
indistinguishability blocks, a finite choice domain, a nondeterministic
mechanism relation over (state, complete profile, state) triples, and a
valuation of proposition tokens.  Histories are mechanism-consistent
alternating sequences of states and complete profiles; all queries here are
pure and every value is immutable after construction.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .formula import Coalition, IDENT_RE

TOKEN_RE = re.compile(r"[A-Za-z0-9_']+")


class ModelFormatError(ValueError):
    """Bad model text: syntax, undeclared names, or a broken partition."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class InvalidHistoryError(ValueError):
    """History literal or History value inconsistent with the system."""


def _cached_hash(self):
    return self._h


@dataclass(frozen=True, order=True)
class Profile:
    """Immutable assignment of one choice to each agent in its domain.

    Used both for complete profiles (domain = all agents of the system) and
    for coalition strategy profiles (domain = the coalition).
    """

    votes: tuple[tuple[str, str], ...]  # sorted (agent, choice) pairs

    __hash__ = _cached_hash

    def __post_init__(self):
        object.__setattr__(self, "_h", hash(self.votes))

    @classmethod
    def of(cls, mapping: Mapping[str, str]) -> "Profile":
        return cls(tuple(sorted(mapping.items())))

    def __getitem__(self, agent: str) -> str:
        for a, choice in self.votes:
            if a == agent:
                return choice
        raise KeyError(agent)

    def __contains__(self, agent: str) -> bool:
        return any(a == agent for a, _ in self.votes)

    @property
    def agents(self) -> Coalition:
        return frozenset(a for a, _ in self.votes)

    def restrict(self, coalition: Coalition) -> "Profile":
        missing = coalition - self.agents
        if missing:
            raise KeyError(sorted(missing)[0])
        return Profile(tuple(p for p in self.votes if p[0] in coalition))

    def __str__(self) -> str:
        return ",".join(f"{a}={c}" for a, c in self.votes)


def profile_agrees(s1: Profile, s2: Profile, coalition: Coalition) -> bool:
    """True iff the two profiles assign the same choice to every agent of the coalition."""
    return all(s1[a] == s2[a] for a in coalition)


@dataclass(frozen=True)
class History:
    """States ``w_0..w_n`` interleaved with the profiles ``s_1..s_n`` that produced them."""

    states: tuple[str, ...]
    profiles: tuple[Profile, ...]

    __hash__ = _cached_hash

    def __post_init__(self):
        if not self.states or len(self.states) != len(self.profiles) + 1:
            raise InvalidHistoryError(
                f"history needs n+1 states for n profiles, got "
                f"{len(self.states)} states and {len(self.profiles)} profiles")
        object.__setattr__(self, "_h", hash((self.states, self.profiles)))

    @property
    def head(self) -> str:
        return self.states[-1]

    @property
    def length(self) -> int:
        return len(self.profiles)

    def extend(self, profile: Profile, state: str) -> "History":
        return History(self.states + (state,), self.profiles + (profile,))

    def __str__(self) -> str:
        parts = [self.states[0]]
        for profile, state in zip(self.profiles, self.states[1:]):
            parts.append(str(profile))
            parts.append(state)
        return " ; ".join(parts)


class EpistemicTransitionSystem:
    """Finite multi-agent transition system with per-agent state partitions.

    ``indist_blocks`` may list only the non-singleton blocks; unlisted states
    become singletons.  The mechanism is stored extensionally as a set of
    (state, complete profile, state) triples and may be nondeterministic.
    Regularity (a successor for every state/profile pair) is *not* enforced
    here; use :func:`check_regular` or load with ``require_regular=True``.
    """

    def __init__(
        self,
        agents: Iterable[str],
        states: Iterable[str],
        choices: Iterable[str],
        indist_blocks: Mapping[str, Iterable[Iterable[str]]],
        mechanism: Iterable[tuple[str, Profile, str]],
        valuation: Mapping[str, Iterable[str]],
    ):
        self.agents = frozenset(agents)
        self.states = frozenset(states)
        self.choices = frozenset(choices)
        if not self.agents:
            raise ModelFormatError("system needs at least one agent")
        if not self.states:
            raise ModelFormatError("system needs at least one state")
        if not self.choices:
            raise ModelFormatError("system needs at least one choice")

        self._block: dict[str, dict[str, int]] = {}
        self.indist: dict[str, tuple[frozenset[str], ...]] = {}
        for agent in sorted(self.agents):
            blocks = [frozenset(b) for b in indist_blocks.get(agent, ())]
            seen: set[str] = set()
            for block in blocks:
                unknown = block - self.states
                if unknown:
                    raise ModelFormatError(
                        f"indist block for {agent!r} names undeclared state "
                        f"{sorted(unknown)[0]!r}")
                overlap = block & seen
                if overlap:
                    raise ModelFormatError(
                        f"state {sorted(overlap)[0]!r} appears in two indist "
                        f"blocks for agent {agent!r}")
                seen |= block
            blocks += [frozenset({w}) for w in sorted(self.states - seen)]
            blocks = tuple(sorted(blocks, key=lambda b: min(b)))
            self.indist[agent] = blocks
            table = {}
            for idx, block in enumerate(blocks):
                for w in block:
                    table[w] = idx
            self._block[agent] = table

        triples = set()
        for w1, profile, w2 in mechanism:
            if w1 not in self.states or w2 not in self.states:
                bad = w1 if w1 not in self.states else w2
                raise ModelFormatError(f"transition names undeclared state {bad!r}")
            if profile.agents != self.agents:
                raise ModelFormatError(
                    f"transition profile {profile} is not over the declared agents")
            for _, choice in profile.votes:
                if choice not in self.choices:
                    raise ModelFormatError(
                        f"transition uses undeclared choice {choice!r}")
            triples.add((w1, profile, w2))
        self.mechanism: frozenset[tuple[str, Profile, str]] = frozenset(triples)

        self.valuation: dict[str, frozenset[str]] = {}
        for prop, where in valuation.items():
            where = frozenset(where)
            unknown = where - self.states
            if unknown:
                raise ModelFormatError(
                    f"valuation of {prop!r} names undeclared state "
                    f"{sorted(unknown)[0]!r}")
            self.valuation[prop] = where

        self._succ: dict[str, tuple[tuple[Profile, str], ...]] = {
            w: () for w in self.states}
        by_state: dict[str, list[tuple[Profile, str]]] = {w: [] for w in self.states}
        for w1, profile, w2 in triples:
            by_state[w1].append((profile, w2))
        for w, out in by_state.items():
            self._succ[w] = tuple(sorted(out))
        self._hist_cache: dict[int, tuple[History, ...]] = {}
        self._regular: bool | None = None

    @property
    def complete_profiles(self) -> tuple[Profile, ...]:
        """All |choices|^|agents| complete profiles, in lexicographic order."""
        agents = sorted(self.agents)
        choices = sorted(self.choices)
        return tuple(
            Profile(tuple(zip(agents, combo)))
            for combo in itertools.product(choices, repeat=len(agents)))

    def profiles_over(self, coalition: Coalition) -> tuple[Profile, ...]:
        """All strategy profiles of the coalition, in lexicographic order."""
        members = sorted(coalition)
        choices = sorted(self.choices)
        return tuple(
            Profile(tuple(zip(members, combo)))
            for combo in itertools.product(choices, repeat=len(members)))

    def successors(self, state: str) -> tuple[tuple[Profile, str], ...]:
        return self._succ[state]

    def block(self, agent: str, state: str) -> int:
        if state not in self.states:
            raise KeyError(state)
        return self._block[agent][state]

    def holds(self, prop: str, state: str) -> bool:
        return state in self.valuation.get(prop, frozenset())

    @property
    def is_regular(self) -> bool:
        if self._regular is None:
            self._regular = not check_regular(self)
        return self._regular


def check_regular(ets: EpistemicTransitionSystem) -> list[tuple[str, Profile]]:
    """List the (state, complete profile) pairs with no successor; empty iff regular."""
    violations = []
    for w in sorted(ets.states):
        with_succ = {profile for profile, _ in ets.successors(w)}
        for profile in ets.complete_profiles:
            if profile not in with_succ:
                violations.append((w, profile))
    return violations


def state_indist(ets: EpistemicTransitionSystem, w1: str, w2: str,
                 coalition: Coalition) -> bool:
    """True iff no agent of the coalition can tell the two states apart."""
    if w1 not in ets.states:
        raise KeyError(w1)
    if w2 not in ets.states:
        raise KeyError(w2)
    for agent in coalition:
        if agent not in ets.agents:
            raise KeyError(agent)
        if ets._block[agent][w1] != ets._block[agent][w2]:
            return False
    return True


def hist_indist(ets: EpistemicTransitionSystem, h1: History, h2: History,
                coalition: Coalition) -> bool:
    """History indistinguishability for a coalition.

    The empty coalition relates any two histories.  Otherwise the histories
    must have equal length, corresponding states must be indistinguishable to
    every member, and corresponding profiles must agree on every member.
    """
    if not coalition:
        return True
    if h1.length != h2.length:
        return False
    for w1, w2 in zip(h1.states, h2.states):
        if not state_indist(ets, w1, w2, coalition):
            return False
    for s1, s2 in zip(h1.profiles, h2.profiles):
        if not profile_agrees(s1, s2, coalition):
            return False
    return True


def validate_history(ets: EpistemicTransitionSystem, h: History) -> None:
    """Raise InvalidHistoryError unless ``h`` is a history of ``ets``."""
    for w in h.states:
        if w not in ets.states:
            raise InvalidHistoryError(f"undeclared state {w!r} in history")
    for w1, profile, w2 in zip(h.states, h.profiles, h.states[1:]):
        if (w1, profile, w2) not in ets.mechanism:
            raise InvalidHistoryError(
                f"({w1} ; {profile} ; {w2}) is not a mechanism transition")


def extensions(ets: EpistemicTransitionSystem, h: History) -> tuple[History, ...]:
    """All one-step extensions of ``h`` permitted by the mechanism."""
    return tuple(h.extend(profile, w) for profile, w in ets.successors(h.head))


def histories_of_length(ets: EpistemicTransitionSystem, n: int) -> tuple[History, ...]:
    """All histories with exactly ``n`` transitions, starting anywhere."""
    if n < 0:
        raise ValueError("history length must be non-negative")
    if n not in ets._hist_cache:
        if n == 0:
            result = tuple(History((w,), ()) for w in sorted(ets.states))
        else:
            result = tuple(
                ext
                for h in histories_of_length(ets, n - 1)
                for ext in extensions(ets, h))
        ets._hist_cache[n] = result
    return ets._hist_cache[n]


def indist_class(ets: EpistemicTransitionSystem, h: History,
                 coalition: Coalition) -> tuple[History, ...]:
    """Every history the coalition cannot distinguish from ``h``.

    Only defined for nonempty coalitions, whose classes are confined to
    histories of equal length; the empty coalition relates histories of all
    lengths and needs horizon-bounded enumeration instead.
    """
    if not coalition:
        raise ValueError("indist_class needs a nonempty coalition")
    return tuple(
        g for g in histories_of_length(ets, h.length)
        if hist_indist(ets, h, g, coalition))


def parse_history(ets: EpistemicTransitionSystem, text: str) -> History:
    """Parse a literal like ``w0 ; a=1,b=0 ; w4`` and validate it against ``ets``."""
    parts = [part.strip() for part in text.split(";")]
    if not parts or len(parts) % 2 == 0:
        raise InvalidHistoryError(
            "history literal must alternate states and profiles, ending in a state")
    states = []
    profiles = []
    for idx, part in enumerate(parts):
        if idx % 2 == 0:
            if not TOKEN_RE.fullmatch(part):
                raise InvalidHistoryError(f"bad state token {part!r}")
            if part not in ets.states:
                raise InvalidHistoryError(f"undeclared state {part!r}")
            states.append(part)
        else:
            votes = {}
            for item in part.split(","):
                item = item.strip()
                if "=" not in item:
                    raise InvalidHistoryError(
                        f"bad profile entry {item!r}, expected agent=choice")
                agent, _, choice = item.partition("=")
                agent, choice = agent.strip(), choice.strip()
                if agent not in ets.agents:
                    raise InvalidHistoryError(f"undeclared agent {agent!r}")
                if choice not in ets.choices:
                    raise InvalidHistoryError(f"undeclared choice {choice!r}")
                if agent in votes:
                    raise InvalidHistoryError(f"agent {agent!r} voted twice")
                votes[agent] = choice
            missing = ets.agents - votes.keys()
            if missing:
                raise InvalidHistoryError(
                    f"profile misses agent {sorted(missing)[0]!r}; history "
                    f"literals need complete profiles")
            profiles.append(Profile.of(votes))
    h = History(tuple(states), tuple(profiles))
    validate_history(ets, h)
    return h


def _expand_pattern(sys_agents: list[str], choices: list[str],
                    constraints: dict[str, str]) -> list[Profile]:
    free = [a for a in sys_agents if a not in constraints]
    out = []
    for combo in itertools.product(choices, repeat=len(free)):
        votes = dict(constraints)
        votes.update(zip(free, combo))
        out.append(Profile.of(votes))
    return out


def load_system(text: str, *, require_regular: bool = True) -> EpistemicTransitionSystem:
    """Parse the line-oriented model format into a validated system.

    Wildcard transition patterns (``trans w0 [a=1] w2`` leaves the other
    agents unconstrained; ``[]`` matches every profile) expand into explicit
    mechanism triples; pattern lines accumulate rather than override.  With
    ``require_regular`` the loader raises if any state/profile pair lacks a
    successor.
    """
    stripped: list[tuple[int, str]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            stripped.append((line_no, line))

    decls: dict[str, list[str]] = {}
    rest: list[tuple[int, str]] = []
    for line_no, line in stripped:
        key, _, value = line.partition(":")
        key = key.strip()
        if key in ("agents", "choices", "states") and _ == ":":
            if key in decls:
                raise ModelFormatError(f"duplicate {key!r} declaration", line_no)
            tokens = value.split()
            for tok in tokens:
                if not TOKEN_RE.fullmatch(tok):
                    raise ModelFormatError(f"bad token {tok!r}", line_no)
                if key != "choices" and not IDENT_RE.fullmatch(tok):
                    raise ModelFormatError(
                        f"{key[:-1]} name {tok!r} must start with a letter or underscore",
                        line_no)
            if len(set(tokens)) != len(tokens):
                raise ModelFormatError(f"duplicate name in {key!r} declaration", line_no)
            if not tokens:
                raise ModelFormatError(f"{key!r} declaration is empty", line_no)
            decls[key] = tokens
        else:
            rest.append((line_no, line))
    for key in ("agents", "choices", "states"):
        if key not in decls:
            raise ModelFormatError(f"missing {key!r} declaration")

    agents = decls["agents"]
    choices = decls["choices"]
    states = decls["states"]
    state_set, agent_set, choice_set = set(states), set(agents), set(choices)

    indist_blocks: dict[str, list[list[str]]] = {a: [] for a in agents}
    valuation: dict[str, set[str]] = {}
    mechanism: list[tuple[str, Profile, str]] = []

    for line_no, line in rest:
        if line.startswith("indist "):
            head, colon, body = line[len("indist "):].partition(":")
            agent = head.strip()
            if not colon:
                raise ModelFormatError("expected ':' in indist line", line_no)
            if agent not in agent_set:
                raise ModelFormatError(f"undeclared agent {agent!r}", line_no)
            for chunk in body.split("|"):
                block = chunk.split()
                if not block:
                    raise ModelFormatError("empty indist block", line_no)
                for w in block:
                    if w not in state_set:
                        raise ModelFormatError(f"undeclared state {w!r}", line_no)
                indist_blocks[agent].append(block)
        elif line.startswith("valuation "):
            head, colon, body = line[len("valuation "):].partition(":")
            prop = head.strip()
            if not colon:
                raise ModelFormatError("expected ':' in valuation line", line_no)
            if not IDENT_RE.fullmatch(prop):
                raise ModelFormatError(f"bad proposition token {prop!r}", line_no)
            for w in body.split():
                if w not in state_set:
                    raise ModelFormatError(f"undeclared state {w!r}", line_no)
                valuation.setdefault(prop, set()).add(w)
        elif line.startswith("trans "):
            m = re.fullmatch(r"trans\s+(\S+)\s+\[([^\]]*)\]\s+(\S+)", line)
            if not m:
                raise ModelFormatError(
                    "expected 'trans STATE [pattern] STATE'", line_no)
            w1, pattern, w2 = m.group(1), m.group(2).strip(), m.group(3)
            for w in (w1, w2):
                if w not in state_set:
                    raise ModelFormatError(f"undeclared state {w!r}", line_no)
            constraints: dict[str, str] = {}
            if pattern:
                for item in pattern.split(","):
                    item = item.strip()
                    if "=" not in item:
                        raise ModelFormatError(
                            f"bad pattern entry {item!r}, expected agent=choice",
                            line_no)
                    agent, _, choice = item.partition("=")
                    agent, choice = agent.strip(), choice.strip()
                    if agent not in agent_set:
                        raise ModelFormatError(f"undeclared agent {agent!r}", line_no)
                    if choice not in choice_set:
                        raise ModelFormatError(f"undeclared choice {choice!r}", line_no)
                    if agent in constraints:
                        raise ModelFormatError(
                            f"agent {agent!r} constrained twice", line_no)
                    constraints[agent] = choice
            for profile in _expand_pattern(agents, choices, constraints):
                mechanism.append((w1, profile, w2))
        else:
            raise ModelFormatError(f"unrecognized line {line!r}", line_no)

    ets = EpistemicTransitionSystem(
        agents, states, choices, indist_blocks, mechanism, valuation)
    if require_regular:
        violations = check_regular(ets)
        if violations:
            w, profile = violations[0]
            raise ModelFormatError(
                f"system is not regular: no successor for state {w!r} under "
                f"profile {profile} ({len(violations)} violations)")
    return ets

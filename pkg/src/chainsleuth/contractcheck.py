"""Heuristic trapdoor screening of token contract source.

Six pattern detectors over verified Solidity source. This is a screening
aid: zero findings NEVER means a contract is safe, and the detectors are
deliberately lexical (no dataflow, no compilation).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

DETECTOR_KINDS = (
    "owner_mint",
    "transfer_blocklist",
    "pausable_transfer",
    "mutable_fee",
    "max_tx_limit",
    "honeypot_sell_restriction",
)


@dataclass(frozen=True)
class TrapdoorFinding:
    kind: str
    line_start: int  # 1-based
    line_end: int
    char_start: int
    char_end: int
    excerpt: str
    detail: str


@dataclass
class ScanResult:
    findings: list[TrapdoorFinding]
    degraded: bool  # lexical-only scan, source did not parse into functions
    warnings: list[str]

    @property
    def is_clean(self) -> bool:
        # "clean" only means these detectors matched nothing
        return not self.findings


_COMMENT_RE = re.compile(r"//[^\n]*|/\*.*?\*/", re.DOTALL)

_FUNCTION_HEAD_RE = re.compile(
    r"function\s+(\w+)\s*\(([^)]*)\)([^{;]*)\{", re.DOTALL
)

_OWNER_GATE_RE = re.compile(
    r"onlyOwner|onlyAdmin|require\s*\(\s*(?:msg\.sender|_msgSender\(\))\s*==\s*_?owner",
    re.IGNORECASE,
)

_BLOCKLIST_ID = r"(?:_?is)?(?:black|block)listed?|isBot|banned|_?bots\b"
_PAUSE_ID = r"tradingEnabled|tradingActive|tradingOpen|swapEnabled|(?<!else\s)paused\b"
_FEE_ASSIGN = r"\w*(?:fee|tax)\w*\s*=\s*[^=]"
_MAXTX_ID = r"maxTx(?:Amount)?|maxTransaction\w*|maxWallet\w*|maxHold\w*|maxSell\w*"
_SELL_RESTRICT = r"canSell|sellEnabled|sellAllowed|cooldown\w*|sellLock\w*"


def _blank_comments(source: str) -> str:
    """Replace comments with spaces so offsets stay aligned with the raw text."""

    def blank(match: re.Match) -> str:
        return "".join(c if c == "\n" else " " for c in match.group(0))

    return _COMMENT_RE.sub(blank, source)


def _line_of(source: str, offset: int) -> int:
    return source.count("\n", 0, offset) + 1


@dataclass
class _Function:
    name: str
    head_start: int
    body_start: int
    body_end: int  # offset just past the closing brace
    header: str

    def body(self, text: str) -> str:
        return text[self.body_start:self.body_end]


def _parse_functions(text: str) -> list[_Function]:
    functions = []
    for match in _FUNCTION_HEAD_RE.finditer(text):
        depth = 1
        i = match.end()
        while i < len(text) and depth > 0:
            if text[i] == "{":
                depth += 1
            elif text[i] == "}":
                depth -= 1
            i += 1
        if depth != 0:
            continue  # unbalanced tail; skip this candidate
        functions.append(_Function(
            name=match.group(1),
            head_start=match.start(),
            body_start=match.end(),
            body_end=i,
            header=match.group(0),
        ))
    return functions


def _finding(source: str, kind: str, start: int, end: int, detail: str) -> TrapdoorFinding:
    return TrapdoorFinding(
        kind=kind,
        line_start=_line_of(source, start),
        line_end=_line_of(source, max(start, end - 1)),
        char_start=start,
        char_end=end,
        excerpt=source[start:end],
        detail=detail,
    )


def _is_transferish(fn: _Function) -> bool:
    return re.search(r"transfer", fn.name, re.IGNORECASE) is not None


def scan_source(
    source_text: str,
    verified: bool = True,
    enabled: Optional[set[str]] = None,
) -> ScanResult:
    """Run the trapdoor detectors over contract source.

    Unverified source still scans (the caller decides how much weight the
    result carries); an empty source or one with no parseable functions
    degrades to a lexical-only pass with a warning, never a crash.
    """
    if enabled is None:
        enabled = set(DETECTOR_KINDS)
    warnings: list[str] = []
    if not verified:
        warnings.append("source not verified on the explorer: treat findings as indicative")

    text = _blank_comments(source_text)
    functions = _parse_functions(text)
    degraded = not functions
    if degraded:
        warnings.append("no function definitions parsed: lexical-only scan")

    findings: list[TrapdoorFinding] = []

    def add_matches(kind: str, pattern: str, detail: str):
        for m in re.finditer(pattern, text, re.IGNORECASE):
            findings.append(_finding(source_text, kind, m.start(), m.end(), detail))

    # owner-gated minting
    if "owner_mint" in enabled:
        for fn in functions:
            gated = _OWNER_GATE_RE.search(fn.header) or _OWNER_GATE_RE.search(fn.body(text))
            mints = re.search(r"\bmint\b", fn.name, re.IGNORECASE) or re.search(
                r"_mint\s*\(", fn.body(text)
            )
            if gated and mints:
                findings.append(_finding(
                    source_text, "owner_mint", fn.head_start,
                    fn.head_start + len(fn.header),
                    f"owner-gated mint path in function {fn.name}",
                ))
        if degraded:
            add_matches(
                "owner_mint",
                r"function\s+mint\w*\s*\([^)]*\)[^{;]*onlyOwner",
                "owner-gated mint (lexical match)",
            )

    # blocklist state consulted in a require/if, or declared at all
    # (whole-text scans keep the monotonicity guarantee: added code can
    # only add findings, never remove them)
    if "transfer_blocklist" in enabled:
        add_matches(
            "transfer_blocklist",
            rf"(?:require|if)\s*\([^;]*?(?:{_BLOCKLIST_ID})",
            "transfer gated on a blocklist flag",
        )
        add_matches(
            "transfer_blocklist",
            rf"mapping\s*\(\s*address\s*=>\s*bool\s*\)[^;]*?(?:{_BLOCKLIST_ID})[^;]*;",
            "blocklist mapping declared",
        )

    # transfers that an owner can pause
    if "pausable_transfer" in enabled:
        add_matches(
            "pausable_transfer",
            rf"(?:require|if)\s*\([^;]*?(?:{_PAUSE_ID})",
            "transfer gated on a trading/pause flag",
        )
        for fn in functions:
            if _is_transferish(fn) and re.search(r"whenNotPaused", fn.header):
                findings.append(_finding(
                    source_text, "pausable_transfer", fn.head_start,
                    fn.head_start + len(fn.header),
                    f"transfer function {fn.name} carries whenNotPaused",
                ))

    # owner can change fees after launch
    if "mutable_fee" in enabled:
        for fn in functions:
            gated = _OWNER_GATE_RE.search(fn.header) or _OWNER_GATE_RE.search(fn.body(text))
            if not gated:
                continue
            for m in re.finditer(_FEE_ASSIGN, fn.body(text), re.IGNORECASE):
                findings.append(_finding(
                    source_text, "mutable_fee",
                    fn.body_start + m.start(), fn.body_start + m.end() - 1,
                    f"owner-gated fee mutation in function {fn.name}",
                ))
        if degraded:
            add_matches(
                "mutable_fee",
                r"function\s+(?:set|update|change)\w*(?:fee|tax)\w*\s*\(",
                "fee setter (lexical match)",
            )

    # per-transaction / per-wallet caps
    if "max_tx_limit" in enabled:
        add_matches(
            "max_tx_limit",
            rf"(?:require|if)\s*\([^;]*?(?:{_MAXTX_ID})",
            "transfer amount capped by a max-tx/max-wallet limit",
        )

    # sell-side restrictions (honeypot shape)
    if "honeypot_sell_restriction" in enabled:
        add_matches(
            "honeypot_sell_restriction",
            rf"(?:require|if)\s*\([^;]*?(?:{_SELL_RESTRICT})",
            "sells gated on a flag or cooldown",
        )

    findings.sort(key=lambda f: (f.char_start, f.kind))
    deduped: list[TrapdoorFinding] = []
    seen = set()
    for f in findings:
        key = (f.kind, f.char_start, f.char_end)
        if key not in seen:
            seen.add(key)
            deduped.append(f)
    return ScanResult(findings=deduped, degraded=degraded, warnings=warnings)

"""Word-category lexicons used by the linguistic features.

Each lexicon is a small bundled word list (UTF-8, one word per line, ``#``
comments). A directory of same-named ``.txt`` files can override any of
them.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

LEXICON_NAMES = (
    "swear",
    "negative_emotion",
    "positive_emotion",
    "pronouns",
    "self_words",
    "negations",
    "intensifiers",
)


@dataclass(frozen=True)
class Lexicon:
    name: str
    words: frozenset[str]

    def __post_init__(self):
        if not self.words:
            raise ValueError(f"lexicon {self.name!r} is empty")

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.words


def parse_lexicon(name: str, text: str) -> Lexicon:
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line.lower())
    return Lexicon(name=name, words=frozenset(words))


def load_lexicon_file(name: str, path: Path) -> Lexicon:
    return parse_lexicon(name, path.read_text("utf-8"))


def load_bundled(name: str) -> Lexicon:
    text = resources.files("credscore.data.lexicons").joinpath(f"{name}.txt").read_text("utf-8")
    return parse_lexicon(name, text)


def load_lexicons(override_dir: Path | str | None = None) -> dict[str, Lexicon]:
    """Load all lexicons, preferring files from `override_dir` when present."""
    out: dict[str, Lexicon] = {}
    for name in LEXICON_NAMES:
        override = Path(override_dir) / f"{name}.txt" if override_dir else None
        if override is not None and override.exists():
            out[name] = load_lexicon_file(name, override)
        else:
            out[name] = load_bundled(name)
    return out

"""Adapter catalog: loading, validation, and routing-prompt construction.

The registry is the single source of truth for which domain experts exist.
Adding, removing, or editing experts happens in the JSON config file only;
the router prompt is rebuilt from the catalog on every render.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import EmptyQuery, ParseError, ValidationError

CARD_KEYS = {
    "name",
    "description",
    "system_prompt",
    "keywords",
    "aliases",
    "model_id",
    "is_fallback",
}


@dataclass(frozen=True)
class AdapterCard:
    """Metadata for one domain expert."""

    name: str
    description: str
    system_prompt: str
    keywords: tuple[str, ...]
    aliases: tuple[str, ...] = ()
    model_id: str = ""
    is_fallback: bool = False

    def labels(self) -> tuple[str, ...]:
        """Canonical name plus all aliases, case-folded."""
        return tuple(s.casefold() for s in (self.name, *self.aliases))


@dataclass(frozen=True)
class Registry:
    """Ordered, validated collection of adapter cards.

    Immutable after load; iteration order is the file order and is used
    for deterministic tie-breaking by the keyword router.
    """

    cards: tuple[AdapterCard, ...]
    source_path: str = ""
    _by_label: dict[str, AdapterCard] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        validate_cards(self.cards)
        lookup = {}
        for card in self.cards:
            for label in card.labels():
                lookup[label] = card
        object.__setattr__(self, "_by_label", lookup)

    def __iter__(self):
        return iter(self.cards)

    def __len__(self) -> int:
        return len(self.cards)

    @property
    def fallback(self) -> AdapterCard:
        return next(c for c in self.cards if c.is_fallback)

    def find(self, label: str) -> AdapterCard | None:
        """Look up a card by name or alias, case-insensitively."""
        return self._by_label.get(label.casefold())

    def names(self) -> list[str]:
        return [c.name for c in self.cards]


def validate_cards(cards: tuple[AdapterCard, ...]) -> None:
    if len(cards) < 2:
        raise ValidationError("registry needs at least 2 adapter cards")
    seen: dict[str, str] = {}
    for card in cards:
        if not card.name.strip():
            raise ValidationError("adapter card with empty name")
        for label in card.labels():
            if label in seen:
                raise ValidationError(
                    f"label {label!r} of card {card.name!r} collides with card {seen[label]!r}"
                )
            seen[label] = card.name
        for kw in card.keywords:
            if not kw or not kw.strip():
                raise ValidationError(f"card {card.name!r} has an empty keyword")
    fallbacks = [c.name for c in cards if c.is_fallback]
    if len(fallbacks) != 1:
        raise ValidationError(
            f"exactly one fallback card required, found {len(fallbacks)}: {fallbacks}"
        )


def _parse_card(raw: dict) -> AdapterCard:
    unknown = set(raw) - CARD_KEYS
    if unknown:
        raise ParseError(f"unknown adapter keys: {sorted(unknown)}")
    missing = {"name", "description", "system_prompt", "keywords", "model_id"} - set(raw)
    if missing:
        raise ParseError(f"adapter missing keys: {sorted(missing)}")
    if not isinstance(raw["keywords"], list) or not all(isinstance(k, str) for k in raw["keywords"]):
        raise ParseError(f"adapter {raw.get('name')!r}: keywords must be a list of strings")
    aliases = raw.get("aliases", [])
    if not isinstance(aliases, list) or not all(isinstance(a, str) for a in aliases):
        raise ParseError(f"adapter {raw.get('name')!r}: aliases must be a list of strings")
    return AdapterCard(
        name=raw["name"],
        description=raw["description"],
        system_prompt=raw["system_prompt"],
        keywords=tuple(k.casefold() for k in raw["keywords"]),
        aliases=tuple(aliases),
        model_id=raw["model_id"],
        is_fallback=bool(raw.get("is_fallback", False)),
    )


def load_registry(path: str) -> Registry:
    """Load and validate the adapter catalog from a JSON config file."""
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot parse adapter config {path}: {exc}") from exc
    if not isinstance(doc, dict) or set(doc) != {"adapters"}:
        raise ParseError("config must be an object with a single 'adapters' key")
    if not isinstance(doc["adapters"], list):
        raise ParseError("'adapters' must be a list")
    cards = tuple(_parse_card(entry) for entry in doc["adapters"])
    return Registry(cards=cards, source_path=str(path))


def save_registry(registry: Registry, path: str) -> None:
    """Serialize the registry back to its config-file form."""
    doc = {
        "adapters": [
            {
                "name": c.name,
                "description": c.description,
                "system_prompt": c.system_prompt,
                "keywords": list(c.keywords),
                "aliases": list(c.aliases),
                "model_id": c.model_id,
                "is_fallback": c.is_fallback,
            }
            for c in registry.cards
        ]
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, ensure_ascii=False)
        f.write("\n")


ROUTING_PROMPT_HEADER = (
    "Analyze this user query and select the most appropriate domain expert to handle it."
)

ROUTING_PROMPT_MARKER = 'Query: "'


def render_routing_prompt(registry: Registry, query: str) -> str:
    """Build the router prompt from the catalog.

    Pure function: same (registry, query) gives byte-identical output.
    One bullet per card, in file order; the fallback card is named in the
    "If unsure" instruction.
    """
    if not query.strip():
        raise EmptyQuery("routing query is empty")
    lines = [
        ROUTING_PROMPT_HEADER,
        "",
        f'Query: "{query}"',
        "",
        "Available Domain Experts:",
    ]
    for card in registry:
        lines.append(f"- {card.name} - {card.description}")
    lines += [
        "",
        "Instructions:",
        "- Analyze the query carefully",
        "- Consider the main topic and intent",
        "- Choose the domain expert that best matches the query",
        f"- If unsure or the query is general/casual, choose {registry.fallback.name}",
        "- Respond with ONLY the domain name",
    ]
    return "\n".join(lines)

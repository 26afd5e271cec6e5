"""Deterministic synthetic dual-corpus generator.

Produces (abstract, graph) pairs whose graphs follow a configurable
pattern distribution and whose abstracts mention the triple values through
the standard rendering table.  Noise knobs reproduce the defects a real
corpus has, so the distillation stages and the review loop always have
work to do:

* ``unfound_rate``        — a value is kept in the graph but omitted from
  the abstract (dropped later by the text check);
* ``drop_year_rate``      — a year triple is removed even though its date
  is present (restored later by the inference rules);
* ``extra_property_rate`` — an out-of-vocabulary triple is added;
* ``no_vocabulary_rate``  — the whole graph is replaced by out-of-vocabulary
  triples (filtered out by the pattern stage);
* ``unlisted_mention_rate`` / ``uncued_alias_rate`` — the abstract mentions
  an alias missing from the graph (extractor discoveries), or mentions the
  alias without a cue phrase the extractor knows (extractor omissions).

Everything is a pure function of the seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .corpus import Example, Provenance
from .rendering import MONTHS
from .turtle_light import Graph

# Default pattern weights: a long-tailed mix over the Person vocabulary.
# The ten heaviest patterns carry 90.4% of the mass; a small assortment of
# rarer patterns shares the remaining 9.6%.
DEFAULT_PATTERN_WEIGHTS: tuple[tuple[frozenset[str], float], ...] = (
    (frozenset({"label", "birthDate", "birthYear"}), 21.6),
    (frozenset({"label"}), 15.5),
    (frozenset({"birthYear"}), 14.4),
    (frozenset({"birthDate", "birthYear"}), 12.4),
    (frozenset({"label", "birthDate", "birthYear", "deathYear", "deathDate"}), 8.1),
    (frozenset({"birthDate", "birthYear", "deathYear", "deathDate"}), 6.6),
    (frozenset({"birthYear", "deathYear"}), 6.1),
    (frozenset({"label", "birthYear"}), 2.4),
    (frozenset({"birthDate", "birthYear", "birthName"}), 1.7),
    (frozenset({"birthDate", "birthYear", "deathYear", "birthName", "deathDate"}), 1.6),
    (frozenset({"label", "birthYear", "deathYear"}), 2.2),
    (frozenset({"label", "birthDate", "birthYear", "alias"}), 1.8),
    (frozenset({"label", "birthDate", "birthYear", "birthName"}), 1.6),
    (frozenset({"birthDate", "birthYear", "alias"}), 1.2),
    (frozenset({"label", "birthDate", "birthYear", "deathDate", "deathYear",
                "birthName"}), 1.0),
    (frozenset({"birthYear", "birthName"}), 0.8),
    (frozenset({"label", "deathYear"}), 0.5),
    (frozenset({"label", "alias", "birthName", "birthDate", "deathDate",
                "birthYear", "deathYear"}), 0.3),
    (frozenset({"birthDate"}), 0.2),
)

_FIRST = (
    "Ada", "Bruno", "Carmen", "Dmitri", "Elena", "Farid", "Greta", "Hiro",
    "Ines", "Jonas", "Katya", "Lionel", "Maud", "Nils", "Odile", "Pavel",
    "Quentin", "Rosa", "Sven", "Tessa", "Umar", "Vera", "Wilhelm", "Xenia",
    "Yusuf", "Zoé", "Amara", "Benoît", "Clara", "Dario",
)
_LAST = (
    "Almeida", "Bergström", "Castellan", "Dufresne", "Eriksen", "Fontaine",
    "Grunewald", "Hartmann", "Ivanova", "Jansson", "Koval", "Lindqvist",
    "Mercier", "Nowak", "Okafor", "Petrov", "Quiroga", "Rautio", "Sørensen",
    "Toledano", "Ustinov", "Valette", "Winther", "Xirau", "Ylönen", "Zabala",
)
_MIDDLE = ("Aurelio", "Beate", "Constant", "Dagmar", "Emeric", "Fiora")
_NICKNAMES = (
    "The Falcon", "Kob", "Lalo", "Mimba", "Nunzio", "Pico", "Rizzo", "Sacha",
    "Tuli", "Vado",
)
_OCCUPATIONS = (
    "painter", "footballer", "composer", "botanist", "film director",
    "sprinter", "novelist", "architect", "chess player", "violinist",
)
_PLACES = (
    "Trieste", "Bergen", "Valparaíso", "Kyoto", "Gdańsk", "Lausanne",
    "Porto", "Tartu", "Sarajevo", "Cuenca",
)


# Noise profile used for the shipped test fixture: enough defects at every
# pipeline stage to exercise projection drops, rule inference, text-check
# filtering, and extractor discoveries/omissions.
FIXTURE_PROFILE = {
    "unfound_rate": 0.18,
    "drop_year_rate": 0.5,
    "extra_property_rate": 0.15,
    "no_vocabulary_rate": 0.05,
    "unlisted_mention_rate": 0.12,
    "uncued_alias_rate": 0.3,
    "uncued_death_rate": 0.35,
    "honorific_rate": 0.12,
}


@dataclass(frozen=True)
class SynthConfig:
    n: int
    seed: int
    unfound_rate: float = 0.0
    drop_year_rate: float = 0.0
    extra_property_rate: float = 0.0
    no_vocabulary_rate: float = 0.0
    unlisted_mention_rate: float = 0.0
    uncued_alias_rate: float = 0.0
    uncued_death_rate: float = 0.0
    honorific_rate: float = 0.0
    weights: tuple = field(default=DEFAULT_PATTERN_WEIGHTS)


def _date_renderings(rng: random.Random, iso: str) -> str:
    year, month, day = iso.split("-")
    name = MONTHS[int(month) - 1]
    forms = (f"{int(day)} {name} {year}", f"{name} {int(day)}, {year}", iso)
    return forms[rng.randrange(3)]


def _random_date(rng: random.Random, lo: int, hi: int) -> str:
    return f"{rng.randint(lo, hi)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"


def generate(config: SynthConfig) -> list[Example]:
    """Generate ``config.n`` examples, reproducibly from the seed."""
    rng = random.Random(config.seed)
    patterns = [w[0] for w in config.weights]
    weights = [w[1] for w in config.weights]
    examples = []
    for index in range(config.n):
        first = rng.choice(_FIRST)
        last = rng.choice(_LAST)
        occupation = rng.choice(_OCCUPATIONS)
        place = rng.choice(_PLACES)
        entity = f"http://example.org/person/{first}_{last}_{index}"
        subject = f"{first}_{last}_{index}"

        if rng.random() < config.no_vocabulary_rate:
            graph = Graph.of(subject, [("occupation", occupation)])
            abstract = (
                f"{first} {last} is a {occupation} associated with {place}."
            )
            examples.append(_example(entity, abstract, graph))
            continue

        pattern = set(rng.choices(patterns, weights=weights, k=1)[0])
        values: dict[str, str] = {}
        if "label" in pattern:
            values["label"] = f"{first} {last}"
        if "birthName" in pattern:
            values["birthName"] = f"{first} {rng.choice(_MIDDLE)} {last}"
        if "alias" in pattern:
            values["alias"] = rng.choice(_NICKNAMES)
        birth_iso = _random_date(rng, 1880, 1979)
        death_iso = _random_date(rng, int(birth_iso[:4]) + 30, 2020)
        if "birthDate" in pattern:
            values["birthDate"] = birth_iso
        if "birthYear" in pattern:
            values["birthYear"] = birth_iso[:4]
        if "deathDate" in pattern:
            values["deathDate"] = death_iso
        if "deathYear" in pattern:
            values["deathYear"] = death_iso[:4]

        unfound = {
            prop
            for prop in values
            if rng.random() < config.unfound_rate
        }
        dropped_years = {
            prop
            for prop in ("birthYear", "deathYear")
            if prop in values
            and prop.replace("Year", "Date") in values
            and rng.random() < config.drop_year_rate
        }

        pairs = [(p, v) for p, v in values.items() if p not in dropped_years]
        if rng.random() < config.extra_property_rate:
            pairs.append(("occupation", occupation))
        graph = Graph.of(subject, pairs)

        mention_alias = "alias" in values and "alias" not in unfound
        extra_alias = None
        if "alias" not in values and rng.random() < config.unlisted_mention_rate:
            extra_alias = rng.choice(_NICKNAMES)
        abstract = _compose(
            rng,
            values,
            unfound,
            occupation,
            place,
            mention_alias=mention_alias,
            extra_alias=extra_alias,
            uncued_alias=rng.random() < config.uncued_alias_rate,
            uncued_death=rng.random() < config.uncued_death_rate,
            honorific=rng.random() < config.honorific_rate,
        )
        examples.append(_example(entity, abstract, graph))
    return examples


def _example(entity: str, abstract: str, graph: Graph) -> Example:
    provenance = {t: Provenance() for t in graph.triples}
    return Example(entity, abstract, graph, provenance)


def _compose(
    rng: random.Random,
    values: dict[str, str],
    unfound: set[str],
    occupation: str,
    place: str,
    mention_alias: bool,
    extra_alias: str | None,
    uncued_alias: bool,
    uncued_death: bool = False,
    honorific: bool = False,
) -> str:
    def visible(prop: str) -> str | None:
        if prop in values and prop not in unfound:
            return values[prop]
        return None

    label = visible("label")
    birth_name = visible("birthName")
    birth_date = visible("birthDate")
    death_date = visible("deathDate")
    birth_year = visible("birthYear")
    death_year = visible("deathYear")

    if label:
        title = rng.choice(("Sir", "Dame", "Professor"))
        opener_name = f"{title} {label}" if honorific else label
    else:
        opener_name = f"This {occupation}"

    paren_parts = []
    if birth_name:
        paren_parts.append(f"born {birth_name}")
    lifespan_in_paren = (
        birth_date and death_date and not uncued_death and rng.random() < 0.5
    )
    if lifespan_in_paren:
        paren_parts.append(
            f"{_date_renderings(rng, birth_date)} – "
            f"{_date_renderings(rng, death_date)}"
        )
    paren = f" ({'; '.join(paren_parts)})" if paren_parts else ""
    sentences = [f"{opener_name}{paren} was a {occupation} from {place}."]

    died = "passed away" if uncued_death else "died"
    if birth_date and not lifespan_in_paren:
        sentences.append(f"He was born {_date_renderings(rng, birth_date)}.")
    elif birth_year and not birth_date:
        sentences.append(f"She was born in {birth_year}.")
    if death_date and not lifespan_in_paren:
        sentences.append(f"He {died} {_date_renderings(rng, death_date)}.")
    elif death_year and not death_date and not lifespan_in_paren:
        sentences.append(f"She {died} in {death_year}.")

    alias = visible("alias") if mention_alias else None
    if alias:
        if uncued_alias:
            sentences.append(f"Admirers nicknamed the {occupation} {alias}.")
        else:
            cue = rng.choice(("better known as", "also known as"))
            sentences.append(f"The {occupation} was {cue} {alias}.")
    if extra_alias:
        sentences.append(f"The {occupation} was also known as {extra_alias}.")

    sentences.append(f"Most of this career happened around {place}.")
    return " ".join(sentences)

"""Rule application engine: ISAD(G) records to ArchOnto graphs.

Rule choice that the mapping language cannot express lives here: title rules
are picked by title type, date rules by date shape (interval vs single
instant), dimension rules by entry kind, and the description-date rule runs
once per date type.  Node identity is deterministic:

* document / carrier / conceptual anchors and event nodes are one-per-record
  (``<ref>/e31/1``, ``<ref>/e12/1``, ...);
* type-like individuals (any class under E55 Type) are shared corpus-wide
  and keyed by their term;
* other value-bearing nodes (identifiers, persons) are keyed by their value;
* remaining structural nodes are keyed by the rule application they belong
  to, so repeated elements mint distinct nodes.

Literal emission follows the data-object pattern: when a data property's
domain is a DataObject class and the current node is not, the engine inserts
the carrier node and links it with L2DO hasValue.
"""

from __future__ import annotations

import calendar
import re
from dataclasses import dataclass, field

from .graph import Graph, Literal, NodeRef, Triple, DEFAULT_BASE_IRI
from .mdl import BindMode, MdlRule, RuleSet, StepKind
from .ontology import (
    LITERAL_RANGES,
    OntologySchema,
    SourceOntology,
    XSD_STRING,
)
from .records import IsadRecord, RecordTree
from .validation import validate_datetime
from .vocabulary import VocabularyRegistry

# Classes minted at most once per record regardless of how many rule
# applications touch them.
SINGLETON_CLASSES = frozenset({"E31", "E22", "E33", "E12", "E65"})

TYPE_ROOT = "E55"
DOCUMENT_CLASS = "E31"
LINK_PROPERTY = "L2DO"

# Non-blank textual elements copied verbatim onto the document node.
ISAD_FALLBACK_MAP: tuple[tuple[str, str], ...] = (
    ("1.1", "ISAD3"),
    ("1.2", "ISAD1"),
    ("1.3", "ISAD5"),
    ("1.4", "ISAD2"),
    ("1.5", "ISAD6"),
    ("2.2", "ISAD7"),
    ("2.3", "ISAD8"),
    ("2.4", "ISAD26"),
    ("3.1", "ISAD9"),
    ("3.3", "ISAD27"),
    ("3.4", "ISAD19"),
    ("4.1", "ISAD10"),
    ("4.2", "ISAD24"),
    ("4.3", "ISAD14"),
    ("4.4", "ISAD20"),
    ("5.2", "ISAD16"),
    ("5.3", "ISAD15"),
    ("5.4", "ISAD17"),
    ("6.1", "ISAD18"),
    ("7.3", "ISAD21"),
    ("title_type", "ISAD4"),
    ("physical_location", "ISAD11"),
    ("previous_location", "ISAD12"),
    ("original_numbering", "ISAD13"),
    ("description_creation_date", "ISAD21"),
    ("description_last_modification", "ISAD22"),
)


class MigrationError(ValueError):
    pass


class UnboundVariableError(MigrationError):
    def __init__(self, variable: str) -> None:
        super().__init__(
            f"variable {variable} is unbound (was the document rule applied first?)"
        )
        self.variable = variable


class StrictVocabularyError(MigrationError):
    def __init__(self, class_id: str, term: str) -> None:
        super().__init__(f"term {term!r} is not in the vocabulary bound to {class_id}")
        self.class_id = class_id
        self.term = term


class DateTextError(MigrationError):
    def __init__(self, text: str) -> None:
        super().__init__(f"cannot interpret date text {text!r}")
        self.text = text


# -- date widening -----------------------------------------------------------

_FULL_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}$")
_YMD_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")
_YM_RE = re.compile(r"^(\d{4})-(\d{2})$")
_Y_RE = re.compile(r"^(\d{4})$")


def widen_date_text(text: str, position: str) -> str:
    """Widen year / month / day precision dates to full timestamps.

    ``position`` is ``start``, ``end`` or ``single``; start and single widen
    to the earliest instant of the stated span, end to the latest.
    """
    value = text.strip()
    if _FULL_RE.match(value):
        if not validate_datetime(value):
            raise DateTextError(text)
        return value
    low = position in ("start", "single")
    match = _Y_RE.match(value)
    if match:
        year = int(match.group(1))
        if year < 1:
            raise DateTextError(text)
        return f"{year:04d}-01-01T00:00:00" if low else f"{year:04d}-12-31T23:59:59"
    match = _YM_RE.match(value)
    if match:
        year, month = int(match.group(1)), int(match.group(2))
        if year < 1 or not 1 <= month <= 12:
            raise DateTextError(text)
        if low:
            return f"{year:04d}-{month:02d}-01T00:00:00"
        last = calendar.monthrange(year, month)[1]
        return f"{year:04d}-{month:02d}-{last:02d}T23:59:59"
    match = _YMD_RE.match(value)
    if match:
        suffix = "T00:00:00" if low else "T23:59:59"
        widened = value + suffix
        if not validate_datetime(widened):
            raise DateTextError(text)
        return widened
    raise DateTextError(text)


# -- rule application ----------------------------------------------------------


@dataclass(frozen=True)
class Application:
    """One firing of a rule: its captures plus engine-supplied context."""

    key: str
    captures: dict[str, str] = field(default_factory=dict)
    class_terms: dict[str, str] = field(default_factory=dict)
    literal_overrides: dict[str, str] = field(default_factory=dict)
    skip_paths: frozenset[int] = frozenset()


@dataclass
class _Slot:
    node: NodeRef | None = None
    text: str | None = None


@dataclass(frozen=True)
class TraceEntry:
    rule_no: int
    application: str | None
    triples: tuple[Triple, ...]
    note: str | None = None


@dataclass(frozen=True)
class RecordProblem:
    reference: str
    severity: str
    message: str

    def line(self) -> str:
        return f"{self.reference}\t{self.severity}\t{self.message}"


@dataclass
class MigrationContext:
    """Per-record state threaded through rule applications."""

    record: IsadRecord
    graph: Graph
    schema: OntologySchema
    registry: VocabularyRegistry
    strict: bool = False
    bindings: dict[str, _Slot] = field(default_factory=dict)
    trace: list[TraceEntry] = field(default_factory=list)
    problems: list[RecordProblem] = field(default_factory=list)

    def warn(self, message: str) -> None:
        self.problems.append(
            RecordProblem(self.record.reference_code, "warning", message)
        )

    def error(self, message: str) -> None:
        self.problems.append(RecordProblem(self.record.reference_code, "error", message))


def _role(class_id: str) -> str:
    return class_id.lower()


def _valued_node(ctx: MigrationContext, class_id: str, text: str) -> NodeRef:
    term = text.strip()
    if ctx.schema.is_subclass(class_id, TYPE_ROOT):
        if ctx.strict and ctx.registry.contains(class_id, term) is False:
            raise StrictVocabularyError(class_id, term)
        return ctx.graph.mint_shared(class_id, term)
    return ctx.graph.mint_node(
        ctx.record.reference_code, _role(class_id), term, class_id
    )


def _structural_node(ctx: MigrationContext, class_id: str, app: Application) -> NodeRef:
    term = app.class_terms.get(class_id)
    if term is not None:
        return _valued_node(ctx, class_id, term)
    disc = "1" if class_id in SINGLETON_CLASSES else app.key
    return ctx.graph.mint_node(
        ctx.record.reference_code, _role(class_id), disc, class_id
    )


def _connect(
    ctx: MigrationContext,
    app: Application,
    subject: NodeRef,
    property_id: str,
    obj: NodeRef | Literal,
) -> list[Triple]:
    prop = ctx.schema.property_def(property_id)
    emitted: list[Triple] = []
    if (
        isinstance(obj, Literal)
        and prop.has_literal_range
        and not ctx.schema.is_subclass(subject.asserted_class, prop.domain)
        and ctx.schema.class_def(prop.domain).source is SourceOntology.DATAOBJECT
    ):
        carrier = ctx.graph.mint_node(
            ctx.record.reference_code, _role(prop.domain), app.key, prop.domain
        )
        ctx.graph.add_triple(subject, LINK_PROPERTY, carrier)
        emitted.append(Triple(subject, LINK_PROPERTY, carrier))
        subject = carrier
    ctx.graph.add_triple(subject, property_id, obj)
    emitted.append(Triple(subject, property_id, obj))
    return emitted


def apply_rule(ctx: MigrationContext, rule: MdlRule, app: Application) -> list[Triple]:
    """Apply one rule firing; returns the triples it emitted."""
    frame: dict[str, _Slot] = {
        var: _Slot(text=value) for var, value in app.captures.items()
    }

    def lookup(var: str) -> _Slot | None:
        return frame.get(var) or ctx.bindings.get(var)

    emitted: list[Triple] = []
    for index, path in enumerate(rule.paths):
        if index in app.skip_paths:
            continue
        current: NodeRef | None = None
        pending: str | None = None
        for step in path:
            if step.kind is StepKind.EDGE:
                pending = step.ident
                continue
            target: NodeRef | Literal
            mode = step.binding.mode if step.binding else None
            if mode is BindMode.DEREF:
                slot = lookup(step.binding.value)
                if slot is None:
                    raise UnboundVariableError(step.binding.value)
                if slot.node is not None:
                    target = slot.node
                elif slot.text is not None:
                    # A textual binding dereferences to the document node of
                    # the record that text names (e.g. a parent reference).
                    target = ctx.graph.mint_node(
                        slot.text, _role(DOCUMENT_CLASS), "1", DOCUMENT_CLASS
                    )
                else:
                    raise UnboundVariableError(step.binding.value)
            elif mode is BindMode.EMIT:
                slot = lookup(step.binding.value)
                if slot is None or slot.text is None:
                    raise UnboundVariableError(step.binding.value)
                datatype = XSD_STRING
                if pending is not None:
                    prop_range = ctx.schema.property_def(pending).range
                    if prop_range in LITERAL_RANGES:
                        datatype = prop_range
                target = Literal(slot.text, datatype)
            elif mode is BindMode.ASSIGN:
                var = step.binding.value
                slot = lookup(var)
                if slot is not None and slot.node is not None:
                    target = slot.node
                elif slot is not None and slot.text is not None:
                    target = _valued_node(ctx, step.ident, slot.text)
                    frame[var] = _Slot(node=target, text=slot.text)
                else:
                    target = _structural_node(ctx, step.ident, app)
                    frame[var] = _Slot(node=target)
            elif mode is BindMode.ASSIGN_LITERAL:
                text = app.literal_overrides.get(step.binding.value, step.binding.value)
                target = _valued_node(ctx, step.ident, text)
            else:
                target = _structural_node(ctx, step.ident, app)
            if pending is not None:
                if current is None:
                    raise MigrationError("path emitted an edge with no subject")
                emitted.extend(_connect(ctx, app, current, pending, target))
                pending = None
            current = target if isinstance(target, NodeRef) else None
    if rule.selector.name == "ISAD":
        ctx.bindings.update(frame)
    return emitted


# -- selector adapters ---------------------------------------------------------


def _paths_with_class(rule: MdlRule, class_id: str) -> frozenset[int]:
    return frozenset(
        index
        for index, path in enumerate(rule.paths)
        if any(step.kind is StepKind.NODE and step.ident == class_id for step in path)
    )


def _paths_with_emit(rule: MdlRule) -> frozenset[int]:
    return frozenset(
        index
        for index, path in enumerate(rule.paths)
        if any(
            step.binding is not None and step.binding.mode is BindMode.EMIT
            for step in path
        )
    )


def _title_type(record: IsadRecord) -> str:
    return record.text("title_type") or "absent"


def _dimension_entries(record: IsadRecord, kind: str) -> list[dict]:
    entries = record.value("dimensions") or []
    return [e for e in entries if e.get("kind", "dimension") == kind]


def _widen_or_warn(
    ctx: MigrationContext, text: str, position: str, element: str
) -> str | None:
    try:
        return widen_date_text(text, position)
    except DateTextError:
        ctx.warn(
            f"{element}: date text {text!r} is not usable; "
            "kept as legacy text only"
        )
        return None


def _date_applications(ctx: MigrationContext, rule: MdlRule) -> list[Application]:
    record = ctx.record
    captures = rule.selector.captures
    if len(captures) == 2:
        start = record.text("production_date_start")
        end = record.text("production_date_end")
        if not start or not end:
            return []
        widened_start = _widen_or_warn(ctx, start, "start", "production date")
        widened_end = _widen_or_warn(ctx, end, "end", "production date")
        if widened_start is None or widened_end is None:
            return []
        return [Application("interval", {captures[0]: widened_start, captures[1]: widened_end})]
    single = record.text("production_date_single")
    if not single or not captures:
        return []
    widened = _widen_or_warn(ctx, single, "single", "production date")
    if widened is None:
        return []
    return [Application("instant", {captures[0]: widened})]


def _description_date_applications(
    ctx: MigrationContext, rule: MdlRule
) -> list[Application]:
    if not rule.selector.captures:
        return []
    capture = rule.selector.captures[0]
    apps = []
    created = ctx.record.text("description_creation_date")
    if created:
        widened = _widen_or_warn(ctx, created, "single", "description creation date")
        if widened is not None:
            apps.append(Application("creation", {capture: widened}))
    modified = ctx.record.text("description_last_modification")
    if modified:
        widened = _widen_or_warn(ctx, modified, "single", "description last modification")
        if widened is not None:
            apps.append(
                Application(
                    "modification",
                    {capture: widened},
                    literal_overrides={"Creation Date": "Last Modification"},
                )
            )
    return apps


def _measure_applications(
    ctx: MigrationContext, rule: MdlRule, kind: str
) -> list[Application]:
    if not rule.selector.captures:
        return []
    capture = rule.selector.captures[0]
    apps = []
    for index, entry in enumerate(_dimension_entries(ctx.record, kind), start=1):
        raw_value = entry.get("value")
        value = str(raw_value).strip() if raw_value is not None else ""
        unit = (entry.get("unit") or "").strip()
        if not value and not unit:
            continue
        skip: frozenset[int] = frozenset()
        if not unit:
            skip |= _paths_with_class(rule, "E58")
        if not value:
            skip |= _paths_with_emit(rule)
        apps.append(
            Application(
                str(index),
                {capture: value} if value else {},
                class_terms={"E58": unit} if unit else {},
                skip_paths=skip,
            )
        )
    return apps


def _term_list_applications(
    ctx: MigrationContext, rule: MdlRule, element: str
) -> list[Application]:
    if not rule.selector.captures:
        return []
    capture = rule.selector.captures[0]
    terms = ctx.record.value(element) or []
    return [
        Application(str(index), {capture: term.strip()})
        for index, term in enumerate(terms, start=1)
        if term.strip()
    ]


def _scalar_application(
    ctx: MigrationContext, rule: MdlRule, element: str
) -> list[Application]:
    if not rule.selector.captures:
        return []
    value = ctx.record.text(element)
    if not value:
        return []
    return [Application("1", {rule.selector.captures[0]: value})]


def _creator_applications(ctx: MigrationContext, rule: MdlRule) -> list[Application]:
    captures = rule.selector.captures
    if not captures:
        return []
    apps = []
    for index, entry in enumerate(ctx.record.value("creators") or [], start=1):
        name = (entry.get("name") or "").strip()
        role = (entry.get("role") or "").strip()
        if not name:
            ctx.warn(f"creator entry {index} has no name; skipped")
            continue
        app_captures = {captures[0]: name}
        skip: frozenset[int] = frozenset()
        if len(captures) > 1 and role:
            app_captures[captures[1]] = role
        else:
            skip = _paths_with_class(rule, "ARE8")
        apps.append(Application(str(index), app_captures, skip_paths=skip))
    return apps


def _applications_for(ctx: MigrationContext, rule: MdlRule) -> list[Application] | None:
    name = rule.selector.name
    record = ctx.record
    if name == "ISAD":
        return [Application("1")]
    if name == "Description Level":
        level = record.text("1.4")
        return [Application("1", {rule.selector.captures[0]: level})] if level and rule.selector.captures else []
    if name == "Reference Code":
        return _scalar_application(ctx, rule, "1.1")
    if name == "Title":
        if _title_type(record) != "absent":
            return []
        return _scalar_application(ctx, rule, "1.2")
    if name == "Formal Title":
        if _title_type(record) != "formal":
            return []
        return _scalar_application(ctx, rule, "1.2")
    if name == "Supplied Title":
        if _title_type(record) != "supplied":
            return []
        return _scalar_application(ctx, rule, "1.2")
    if name == "Production Date":
        return _date_applications(ctx, rule)
    if name == "Dimension":
        return _measure_applications(ctx, rule, "dimension")
    if name == "Extension":
        return _measure_applications(ctx, rule, "extension")
    if name == "Support":
        return _term_list_applications(ctx, rule, "supports")
    if name == "Language":
        return _term_list_applications(ctx, rule, "languages")
    if name == "Physical Location":
        return _scalar_application(ctx, rule, "physical_location")
    if name == "Original Numbering":
        return _scalar_application(ctx, rule, "original_numbering")
    if name == "Previous Location":
        return _scalar_application(ctx, rule, "previous_location")
    if name == "Creation Date":
        return _description_date_applications(ctx, rule)
    if name == "Parent Record":
        parent = record.parent_reference
        if parent is None or not rule.selector.captures:
            return []
        return [Application("1", {rule.selector.captures[0]: parent})]
    if name == "Creator":
        return _creator_applications(ctx, rule)
    return None


# -- record and corpus drivers ---------------------------------------------------


@dataclass
class RecordMigration:
    graph: Graph
    trace: tuple[TraceEntry, ...]
    problems: tuple[RecordProblem, ...]


def migrate_record(
    record: IsadRecord,
    rules: RuleSet,
    schema: OntologySchema,
    registry: VocabularyRegistry,
    *,
    base_iri: str = DEFAULT_BASE_IRI,
    strict: bool = False,
) -> RecordMigration:
    """Apply the rule set to one (already resolved) record."""
    graph = Graph(schema, base_iri, strict)
    ctx = MigrationContext(record, graph, schema, registry, strict)
    ordered = sorted(
        range(len(rules.rules)), key=lambda i: (rules.rules[i].selector.name != "ISAD", i)
    )
    for position in ordered:
        rule = rules.rules[position]
        apps = _applications_for(ctx, rule)
        if apps is None:
            ctx.warn(f"rule {rule.rule_no}: no engine adapter for selector "
                     f"{rule.selector.name!r}; rule skipped")
            ctx.trace.append(TraceEntry(rule.rule_no, None, (), "unknown selector"))
            continue
        if not apps:
            ctx.trace.append(TraceEntry(rule.rule_no, None, (), "element blank; skipped"))
            continue
        for app in apps:
            try:
                triples = apply_rule(ctx, rule, app)
            except MigrationError as exc:
                ctx.error(f"rule {rule.rule_no} ({app.key}): {exc}")
                ctx.trace.append(TraceEntry(rule.rule_no, app.key, (), str(exc)))
                continue
            ctx.trace.append(TraceEntry(rule.rule_no, app.key, tuple(triples)))
    return RecordMigration(graph, tuple(ctx.trace), tuple(ctx.problems))


def attach_isad_fallback(record: IsadRecord, graph: Graph) -> Graph:
    """Copy every mapped non-blank textual element verbatim onto the document."""
    document = graph.mint_node(
        record.reference_code, _role(DOCUMENT_CLASS), "1", DOCUMENT_CLASS
    )
    for element, property_id in ISAD_FALLBACK_MAP:
        value = record.value(element)
        if not isinstance(value, str) or not value.strip():
            continue
        if element == "title_type" and value.strip() == "absent":
            continue
        graph.add_triple(document, property_id, Literal(value))
    return graph


@dataclass
class MigrationResult:
    graph: Graph
    problems: tuple[RecordProblem, ...]
    record_count: int

    @property
    def has_errors(self) -> bool:
        return any(problem.severity == "error" for problem in self.problems)

    def report_lines(self) -> list[str]:
        return [problem.line() for problem in self.problems]


def migrate_tree(
    tree: RecordTree,
    rules: RuleSet,
    schema: OntologySchema,
    registry: VocabularyRegistry,
    *,
    base_iri: str = DEFAULT_BASE_IRI,
    strict: bool = False,
    fail_fast: bool = False,
) -> MigrationResult:
    """Migrate every record of a resolved tree into one deterministic graph."""
    graph = Graph(schema, base_iri, strict)
    problems: list[RecordProblem] = []
    for reference in sorted(tree.records):
        record = tree.records[reference]
        try:
            outcome = migrate_record(
                record, rules, schema, registry, base_iri=base_iri, strict=strict
            )
            attach_isad_fallback(record, outcome.graph)
            graph.absorb(outcome.graph)
            problems.extend(outcome.problems)
        except Exception as exc:
            if fail_fast:
                raise MigrationError(f"record {reference}: {exc}") from exc
            problems.append(RecordProblem(reference, "error", str(exc)))
    problems.sort(key=lambda p: (p.reference, p.severity, p.message))
    if fail_fast and any(p.severity == "error" for p in problems):
        first = next(p for p in problems if p.severity == "error")
        raise MigrationError(f"record {first.reference}: {first.message}")
    return MigrationResult(graph, tuple(problems), len(tree.records))

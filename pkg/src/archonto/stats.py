"""Usage accounting: class and property occurrence counts per source ontology."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Graph
from .ontology import OntologySchema

UNKNOWN_BUCKET = "unknown"


@dataclass(frozen=True)
class UsageReport:
    """Counts in descending order; ties broken by identifier."""

    class_counts: tuple[tuple[str, str, int], ...]
    property_counts: tuple[tuple[str, str, int], ...]
    ontology_totals: tuple[tuple[str, int], ...]

    @property
    def total_properties(self) -> int:
        return sum(count for _, count in self.ontology_totals)


def _ontology_of_class(schema: OntologySchema, class_id: str) -> str:
    if class_id and schema.has_class(class_id):
        return schema.class_def(class_id).source.value
    return UNKNOWN_BUCKET


def _ontology_of_property(schema: OntologySchema, property_id: str) -> str:
    if schema.has_property(property_id):
        return schema.property_def(property_id).source.value
    return UNKNOWN_BUCKET


def usage_report(graph: Graph, schema: OntologySchema | None = None) -> UsageReport:
    """Tally node classes and triple properties, grouped by source ontology.

    Type assertions added at serialization time are not triples and are not
    counted; only modelled statements are.
    """
    schema = schema or graph.schema
    class_tally: dict[str, int] = {}
    for node in graph.node_index.values():
        key = node.asserted_class or "(untyped)"
        class_tally[key] = class_tally.get(key, 0) + 1
    property_tally: dict[str, int] = {}
    for triple in graph.triples:
        property_tally[triple.predicate] = property_tally.get(triple.predicate, 0) + 1

    def ranked(tally: dict[str, int], ontology_of) -> tuple[tuple[str, str, int], ...]:
        rows = [
            (ontology_of(schema, identifier), identifier, count)
            for identifier, count in tally.items()
        ]
        rows.sort(key=lambda row: (-row[2], row[1]))
        return tuple(rows)

    totals: dict[str, int] = {}
    for identifier, count in property_tally.items():
        ontology = _ontology_of_property(schema, identifier)
        totals[ontology] = totals.get(ontology, 0) + count
    return UsageReport(
        ranked(class_tally, _ontology_of_class),
        ranked(property_tally, _ontology_of_property),
        tuple(sorted(totals.items())),
    )


def render_usage(report: UsageReport, format: str = "table") -> str:
    """Aligned-column table or ONTOLOGY<TAB>ID<TAB>COUNT lines."""
    if format == "tsv":
        lines = [
            f"{ontology}\t{identifier}\t{count}"
            for ontology, identifier, count in report.class_counts
        ]
        lines += [
            f"{ontology}\t{identifier}\t{count}"
            for ontology, identifier, count in report.property_counts
        ]
        lines += [f"{ontology}\t*\t{count}" for ontology, count in report.ontology_totals]
        return "\n".join(lines) + ("\n" if lines else "")

    def section(title: str, rows: tuple[tuple[str, str, int], ...]) -> list[str]:
        lines = [title]
        if not rows:
            return lines + ["  (none)"]
        width_ontology = max(len(r[0]) for r in rows)
        width_id = max(len(r[1]) for r in rows)
        for ontology, identifier, count in rows:
            lines.append(
                f"  {ontology:<{width_ontology}}  {identifier:<{width_id}}  {count}"
            )
        return lines

    lines = section("Classes", report.class_counts)
    lines += [""]
    lines += section("Properties", report.property_counts)
    lines += ["", "Property totals by ontology"]
    if report.ontology_totals:
        width = max(len(o) for o, _ in report.ontology_totals)
        for ontology, count in report.ontology_totals:
            lines.append(f"  {ontology:<{width}}  {count}")
        lines.append(f"  {'total':<{width}}  {report.total_properties}")
    else:
        lines.append("  (none)")
    return "\n".join(lines) + "\n"

"""Database schema model: tables, columns, keys, and schema file loading."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class SchemaError(ValueError):
    """Raised when a schema document violates its invariants."""


@dataclass(frozen=True)
class Column:
    name: str
    type: str = "text"


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple[Column, ...]
    primary_key: tuple[str, ...] = ()
    sample_rows: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        if len(self.sample_rows) > 2:
            raise SchemaError(
                f"table {self.name!r}: at most 2 sample rows allowed, got {len(self.sample_rows)}"
            )
        for row in self.sample_rows:
            if len(row) != len(self.columns):
                raise SchemaError(
                    f"table {self.name!r}: sample row arity {len(row)} != column count {len(self.columns)}"
                )

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def has_column(self, name: str) -> bool:
        lowered = name.lower()
        return any(c.name.lower() == lowered for c in self.columns)


@dataclass(frozen=True)
class Schema:
    """Schema of one database: tables, per-table columns, and key constraints."""

    db_id: str
    tables: tuple[Table, ...]
    foreign_keys: tuple[tuple[str, str], ...] = ()
    _by_name: dict = field(init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self):
        by_name: dict[str, Table] = {}
        for table in self.tables:
            key = table.name.lower()
            if key in by_name:
                raise SchemaError(f"duplicate table name {table.name!r} in schema {self.db_id!r}")
            by_name[key] = table
            seen_cols = set()
            for col in table.columns:
                lowered = col.name.lower()
                if lowered in seen_cols:
                    raise SchemaError(
                        f"duplicate column {col.name!r} in table {table.name!r}"
                    )
                seen_cols.add(lowered)
        object.__setattr__(self, "_by_name", by_name)
        for table in self.tables:
            for pk in table.primary_key:
                if not table.has_column(pk):
                    raise SchemaError(
                        f"primary key {pk!r} of table {table.name!r} is not a column"
                    )
        for left, right in self.foreign_keys:
            for endpoint in (left, right):
                if not self.resolves(endpoint):
                    raise SchemaError(f"foreign key endpoint {endpoint!r} does not resolve")

    def table(self, name: str) -> Table:
        try:
            return self._by_name[name.lower()]
        except KeyError:
            raise SchemaError(f"no table {name!r} in schema {self.db_id!r}") from None

    def has_table(self, name: str) -> bool:
        return name.lower() in self._by_name

    def resolves(self, column_ref: str) -> bool:
        """True if a dotted ``table.column`` reference names a real column."""
        if "." not in column_ref:
            return False
        table_name, col_name = column_ref.split(".", 1)
        return self.has_table(table_name) and self.table(table_name).has_column(col_name)

    def item_names(self) -> set[str]:
        """All table and column names declared in the schema (lowercased)."""
        names = set()
        for table in self.tables:
            names.add(table.name.lower())
            for col in table.columns:
                names.add(col.name.lower())
        return names

    def fk_pairs(self) -> set[frozenset]:
        return {frozenset((a.lower(), b.lower())) for a, b in self.foreign_keys}


def schema_from_dict(doc: dict) -> Schema:
    """Build a Schema from one schema-file document."""
    tables = []
    for tdoc in doc["tables"]:
        columns = tuple(Column(c["name"], c.get("type", "text")) for c in tdoc["columns"])
        tables.append(
            Table(
                name=tdoc["name"],
                columns=columns,
                primary_key=tuple(tdoc.get("primary_key", ())),
                sample_rows=tuple(
                    tuple(str(v) for v in row) for row in tdoc.get("sample_rows", ())[:2]
                ),
            )
        )
    fks = tuple((a, b) for a, b in doc.get("foreign_keys", ()))
    return Schema(db_id=doc["db_id"], tables=tuple(tables), foreign_keys=fks)


def load_schemas(path: str) -> dict[str, Schema]:
    """Load a schema file (JSON list of schema documents) keyed by db_id."""
    with open(path, encoding="utf-8") as fh:
        docs = json.load(fh)
    if isinstance(docs, dict):
        docs = [docs]
    schemas = {}
    for doc in docs:
        schema = schema_from_dict(doc)
        if schema.db_id in schemas:
            raise SchemaError(f"duplicate db_id {schema.db_id!r} in {path}")
        schemas[schema.db_id] = schema
    return schemas

"""Regenerate the bundled JSON fixtures under src/provqbe/data."""

from pathlib import Path

from provqbe import datasets as ds
from provqbe.formats import (
    example_rows_to_dict,
    example_to_rows,
    instance_to_dict,
    save,
    schema_to_dict,
)
from provqbe.querytext import render_sql

OUT = Path(__file__).resolve().parents[1] / "src" / "provqbe" / "data"


def main():
    OUT.mkdir(exist_ok=True)
    save(OUT / "running_schema.json", schema_to_dict(ds.running_schema()))
    save(OUT / "running_instance.json", instance_to_dict(ds.running_instance()))
    save(OUT / "prov_full.json", example_rows_to_dict(example_to_rows(ds.running_example("full"))))
    save(OUT / "prov_partial.json", example_rows_to_dict(example_to_rows(ds.running_example("partial"))))
    save(OUT / "prov_values.json", example_rows_to_dict(ds.running_value_rows()))
    (OUT / "intended_query.dl").write_text(ds.INTENDED_QUERY + "\n")
    (OUT / "doubled_writes.dl").write_text(ds.DOUBLED_WRITES_QUERY + "\n")
    save(OUT / "mas_schema.json", schema_to_dict(ds.mas_schema()))
    save(OUT / "mas_instance.json", instance_to_dict(ds.mas_instance()))
    d = ds.mas_instance()
    for n in range(1, 10):
        ex = ds.example_from_query(ds.mas_query(n), d)
        save(OUT / f"mas_q{n}_prov.json", example_rows_to_dict(example_to_rows(ex)))
    (OUT / "mas_q1.sql").write_text(render_sql(ds.mas_query(1), ds.mas_schema()) + "\n")


if __name__ == "__main__":
    main()

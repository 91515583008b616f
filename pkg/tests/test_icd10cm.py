import io
import os

import pytest

from medcoder.ontology import load_ontology

TABULAR_XML = b"""<?xml version="1.0" encoding="UTF-8"?>
<ICD10CM.tabular>
  <version>2026</version>
  <chapter>
    <name>4</name>
    <desc>Endocrine diseases</desc>
    <section id="E08-E13">
      <desc>Diabetes mellitus (E08-E13)</desc>
      <diag>
        <name>E11</name>
        <desc>Type 2 diabetes mellitus</desc>
        <excludes1>
          <note>type 1 diabetes mellitus (E10.-)</note>
        </excludes1>
        <diag>
          <name>E11.9</name>
          <desc>Type 2 diabetes mellitus without complications</desc>
        </diag>
      </diag>
      <diag>
        <name>E10</name>
        <desc>Type 1 diabetes mellitus</desc>
        <diag>
          <name>E10.9</name>
          <desc>Type 1 diabetes mellitus without complications</desc>
          <inclusionTerm>
            <note>Type 1 diabetes mellitus NOS</note>
          </inclusionTerm>
        </diag>
      </diag>
      <diag>
        <name>S52.50</name>
        <desc>Unspecified fracture of the lower end of radius</desc>
        <sevenChrDef>
          <extension char="A">initial encounter</extension>
          <extension char="D">subsequent encounter</extension>
        </sevenChrDef>
        <diag>
          <name>S52.501</name>
          <desc>Fracture of the lower end of right radius</desc>
        </diag>
      </diag>
    </section>
  </chapter>
</ICD10CM.tabular>
"""


def test_xml_adapter_parses_synthetic_release():
    o = load_ontology(io.BytesIO(TABULAR_XML), format="icd10cm_xml_adapter")
    assert o.system_id == "ICD-10-CM"
    assert o.version == "2026"
    assert len(o.codes) == 6
    e11 = o.get_code("E11")
    assert not e11.billable
    (note,) = [n for n in e11.notes if n.kind == "excludes1"]
    assert note.resolved == frozenset({"E10", "E109"})
    assert o.get_code("E11.9").billable
    rule = o.seventh_char_rule("S52.501")
    assert rule is not None and rule.allowed["A"] == "initial encounter"
    incl = [n for n in o.get_code("E10.9").notes if n.kind == "inclusion_term"]
    assert incl and incl[0].text == "Type 1 diabetes mellitus NOS"


def test_xml_adapter_rejects_malformed():
    from medcoder.errors import ParseError

    with pytest.raises(ParseError):
        load_ontology(io.BytesIO(b"<ICD10CM.tabular><chapter>"),
                      format="icd10cm_xml_adapter")


@pytest.mark.skipif(
    not os.environ.get("ICD10CM_TABULAR_XML"),
    reason="set ICD10CM_TABULAR_XML to a real tabular XML release to run",
)
def test_xml_adapter_real_release():
    path = os.environ["ICD10CM_TABULAR_XML"]
    with open(path, "rb") as fh:
        o = load_ontology(fh, format="icd10cm_xml_adapter")
    assert len(o.codes) > 10_000
    assert any(e.billable for e in o.codes)

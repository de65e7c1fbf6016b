use std::collections::BTreeMap;

use actcause_core::{eval, CausalFormula, DefinitionVariant, EventFormula, Modality, Value, VariableId};
use actcause_dsl::{
    load_model, parse_causal, parse_event, parse_model, parse_query, query_context, select_context,
    serialize_model, to_document, Command, DslError, EqBody, Item, Pos,
};

const FOREST: &str = "
model forest_fire {
  exo U : {u00, u10, u01, u11};
  var L : {0, 1};
  var ML : {0, 1};
  var F : {0, 1};
  eq L = U = u10 | U = u11;
  eq ML = U = u01 | U = u11;
  eq F = L | ML;
  context u11 { U = u11 }
  context u10 { U = u10 }
}
";

const ARSON: &str = "
model arson {
  exo U : {u00, u10, u01, u11};
  var ML1 : {0, 1};
  var ML2 : {0, 1};
  var FB : {0, 1};
  eq ML1 = U = u10 | U = u11;
  eq ML2 = U = u01 | U = u11;
  eq FB = case (ML1, ML2) { (0, 0) => 0; else => 1 };
  context u11 { U = u11 }
}
";

fn voting(range: &str) -> String {
    format!(
        "model voting {{
  exo U1 : {{0, 1}};
  exo U2 : {{0, 1}};
  var V1 : {{0, 1}};
  var V2 : {{0, 1}};
  var M : {{{range}}};
  var P : {{0, 1}};
  eq V1 = U1;
  eq V2 = U2;
  eq M = V1 + V2;
  eq P = case {{ M = 0 => 0; else => 1 }};
  context both {{ U1 = 1, U2 = 1 }}
}}"
    )
}

#[test]
fn forest_fire_document_builds_the_expected_model() {
    let m = load_model(FOREST).unwrap();
    let edges: Vec<(String, String)> = m
        .model
        .edges()
        .into_iter()
        .filter(|(a, _)| a.as_str() != "U")
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    assert_eq!(edges, vec![("L".into(), "F".into()), ("ML".into(), "F".into())]);
    assert!(m.model.is_recursive());
    let ctx = m.context("u10").unwrap();
    assert_eq!(m.model.solve(ctx).unwrap().get("F"), Some(&Value::Int(1)));
    // With L clamped to 0, F follows ML.
    let sub = m
        .model
        .submodel(&BTreeMap::from([(VariableId::new("L").unwrap(), Value::Int(0))]))
        .unwrap();
    assert_eq!(sub.solve(ctx).unwrap().get("F"), Some(&Value::Int(0)));
    assert_eq!(sub.solve(m.context("u11").unwrap()).unwrap().get("F"), Some(&Value::Int(1)));
}

#[test]
fn empty_model_body_is_a_syntax_error() {
    let err = parse_model("model m {\n}\n").unwrap_err();
    assert!(matches!(err, DslError::Syntax { .. }), "{err}");
    assert_eq!(err.pos(), Pos { line: 2, col: 1 });
    assert!(err.to_string().contains("endogenous"));
}

#[test]
fn voting_sum_must_fit_its_range() {
    let ok = load_model(&voting("0, 1, 2")).unwrap();
    let ctx = ok.context("both").unwrap();
    assert_eq!(ok.model.solve(ctx).unwrap().get("M"), Some(&Value::Int(2)));
    let err = load_model(&voting("0, 1")).unwrap_err();
    assert!(matches!(err, DslError::Type { .. }), "{err}");
    assert_eq!(err.pos().line, 10);
}

#[test]
fn boolean_connectives_need_binary_operands() {
    let text = "model m { exo U : {0, 1}; var A : {0, 1, 2}; var B : {0, 1}; eq A = U; eq B = A | U; }";
    let err = load_model(text).unwrap_err();
    assert!(matches!(err, DslError::Type { .. }), "{err}");
    let text = "model m { exo U : {a, b}; var B : {0, 1}; eq B = U = c; }";
    assert!(matches!(load_model(text).unwrap_err(), DslError::UnknownIdentifier { .. }));
    let text = "model m { exo U : {a, b}; var B : {0, 1}; eq B = U = 1; }";
    assert!(matches!(load_model(text).unwrap_err(), DslError::Type { .. }));
    let text = "model m { exo U : {a, b}; var B : {0, 1}; eq B = U + 1; }";
    assert!(matches!(load_model(text).unwrap_err(), DslError::Type { .. }));
}

#[test]
fn symbols_and_variables_resolve_by_declaration() {
    let text = "model m { exo ES : {none, may, june, both}; var AS : {0, 1}; eq AS = ES = may | ES = both; context c { ES = both } }";
    let m = load_model(text).unwrap();
    let Item::Eq { body: EqBody::Expr(e), .. } = &m.document.items[2] else { panic!() };
    assert!(e.variables().iter().all(|v| v.as_str() == "ES"));
    assert_eq!(m.model.solve(m.context("c").unwrap()).unwrap().get("AS"), Some(&Value::Int(1)));
}

#[test]
fn structural_errors_carry_positions() {
    let missing = "model m {\n  var A : {0, 1};\n}";
    let err = load_model(missing).unwrap_err();
    assert_eq!(err.pos(), Pos { line: 2, col: 3 });
    let twice = "model m {\n  var A : {0, 1};\n  eq A = 0;\n  eq A = 1;\n}";
    assert_eq!(load_model(twice).unwrap_err().pos(), Pos { line: 4, col: 3 });
    let table = "model m {\n  var A : {0, 1};\n  var B : {0, 1};\n  eq A = 0;\n  eq B = case A { 0 => 1 };\n}";
    let err = load_model(table).unwrap_err();
    assert!(matches!(err, DslError::Type { .. }), "{err}");
    assert_eq!(err.pos().line, 5);
    let cyclic = "model m { var X : {0, 1}; var Y : {0, 1}; eq X = Y; eq Y = X; }";
    assert!(!load_model(cyclic).unwrap().model.is_recursive());
}

#[test]
fn queries_resolve_against_the_model() {
    let m = load_model(ARSON).unwrap();
    let q = parse_query("check cause ML1=1 of FB=1 context u11", &m).unwrap();
    let Command::Check { cause, effect } = &q.command else { panic!() };
    assert_eq!(cause.len(), 1);
    assert_eq!(cause[0].variable.as_str(), "ML1");
    assert_eq!(*effect, EventFormula::prim("FB", 1).unwrap());
    assert_eq!(q.variant, DefinitionVariant::Updated);
    let ctx = query_context(&m, &q).unwrap();
    assert_eq!(ctx.get("U"), Some(&Value::sym("u11")));

    let q = parse_query("check ML1=1 & ML2=1 of FB=1 definition strong extended", &m).unwrap();
    assert_eq!(q.variant, DefinitionVariant::Strong);
    assert!(q.extended);

    let err = parse_query("check cause of FB=1", &m).unwrap_err();
    assert!(matches!(err, DslError::Syntax { .. }), "{err}");
    assert_eq!(err.pos(), Pos { line: 1, col: 13 });

    assert!(matches!(
        parse_query("check cause ML3=1 of FB=1", &m).unwrap_err(),
        DslError::UnknownIdentifier { .. }
    ));
    assert!(matches!(
        parse_query("check cause ML1=2 of FB=1", &m).unwrap_err(),
        DslError::Type { .. }
    ));
    assert!(matches!(
        parse_query("check cause ML1=1 of FB=1 context nowhere", &m).unwrap_err(),
        DslError::UnknownIdentifier { .. }
    ));
    assert!(matches!(
        parse_query("check cause U=u11 of FB=1", &m).unwrap_err(),
        DslError::Type { .. }
    ));
}

#[test]
fn eval_queries_parse_interventions() {
    let doctor = "model doctor {
  exo UMT : {0, 1};
  exo UTT : {0, 1};
  var MT : {0, 1};
  var TT : {0, 1};
  var BMC : {0, 1, 2, 3};
  eq MT = UMT;
  eq TT = !MT & UTT;
  eq BMC = case (MT, TT) { (0, 0) => 2; (0, 1) => 1; (1, 0) => 0; (1, 1) => 3 };
  context base { UMT = 1, UTT = 1 }
}";
    let m = load_model(doctor).unwrap();
    let q = parse_query("eval [MT<-0](BMC=0 | BMC=1 | BMC=2) context base", &m).unwrap();
    let Command::Eval(psi) = &q.command else { panic!() };
    let CausalFormula::Basic { intervention, modality, .. } = psi else { panic!("{psi:?}") };
    assert_eq!(*modality, Modality::Box);
    assert_eq!(intervention[0].0.as_str(), "MT");
    assert!(eval(&m.model, &query_context(&m, &q).unwrap(), psi).unwrap());
}

#[test]
fn formula_sugar_desugars() {
    let imp = parse_event("A=1 -> B=0", None).unwrap();
    assert_eq!(
        imp,
        EventFormula::Or(vec![EventFormula::prim("A", 1).unwrap().not(), EventFormula::prim("B", 0).unwrap()])
    );
    let iff = parse_event("A=1 <-> B=0", None).unwrap();
    assert!(matches!(iff, EventFormula::Or(ref cs) if cs.len() == 2));
    let ne = parse_event("A!=1", None).unwrap();
    assert_eq!(ne, EventFormula::prim("A", 1).unwrap().not());
    let plain = parse_causal("A=1 & !B=0", None).unwrap();
    assert!(matches!(plain, CausalFormula::Event(_)));
    let mixed = parse_causal("A=1 & <B<-0>C=1", None).unwrap();
    let CausalFormula::And(cs) = mixed else { panic!() };
    assert!(matches!(cs[1], CausalFormula::Basic { modality: Modality::Diamond, .. }));
    let neg = parse_causal("[X<--1]Y=a", None).unwrap();
    let CausalFormula::Basic { intervention, .. } = neg else { panic!() };
    assert_eq!(intervention[0].1, Value::Int(-1));
}

#[test]
fn contexts_select_by_name_or_inline() {
    let m = load_model(FOREST).unwrap();
    assert_eq!(select_context(&m, Some("u10")).unwrap().get("U"), Some(&Value::sym("u10")));
    assert_eq!(select_context(&m, Some("U=u01")).unwrap().get("U"), Some(&Value::sym("u01")));
    assert!(matches!(select_context(&m, Some("u77")).unwrap_err(), DslError::UnknownIdentifier { .. }));
    assert!(matches!(select_context(&m, Some("U=u77")).unwrap_err(), DslError::Type { .. }));
    assert!(select_context(&m, None).is_err());
}

#[test]
fn tables_serialize_exhaustively_and_reparse_to_the_same_rule() {
    let m = load_model(ARSON).unwrap();
    let doc = to_document(m.name(), &m.model, &m.contexts, m.allow.as_ref());
    let text = serialize_model(&doc);
    assert!(text.contains("(0, 1) => 1;"), "{text}");
    assert!(!text.contains("else"), "{text}");
    let again = load_model(&text).unwrap();
    assert_eq!(again.document, doc);
    assert_eq!(again.model.mechanism("FB"), m.model.mechanism("FB"));
}

#[test]
fn allow_constraints_round_trip() {
    let text = "model nb { exo U : {0, 1}; var H1 : {0, 1}; var BS1 : {0, 1}; eq H1 = U; eq BS1 = H1; allow !(BS1=0 & H1=1); }";
    let doc = parse_model(text).unwrap();
    let printed = serialize_model(&doc);
    assert!(printed.contains("allow !(BS1=0 & H1=1);"), "{printed}");
    assert_eq!(parse_model(&printed).unwrap(), doc);
    let m = load_model(text).unwrap();
    assert!(m.allow.is_some());
    assert!(!m.extended().is_allowable(&actcause_core::Assignment::from_pairs([("H1", 1), ("BS1", 0)]).unwrap()).unwrap());
}

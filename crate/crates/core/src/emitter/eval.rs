//! Evaluator for emitted models: loads model and data text, then checks every
//! constraint against a complete assignment of the decision variables.

use super::syntax::{parse, Expr, Item, Located, SyntaxError, TypeInst};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("model: {0}")]
    ModelSyntax(SyntaxError),
    #[error("data: {0}")]
    DataSyntax(SyntaxError),
    #[error("unknown identifier `{0}`")]
    Unknown(String),
    #[error("`{0}` is defined more than once")]
    Redefined(String),
    #[error("parameter `{0}` has no value")]
    Unassigned(String),
    #[error("decision variable `{0}` has no value in the assignment")]
    MissingVariable(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("index {index} out of range for `{array}`")]
    Index { array: String, index: String },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Int(i64),
    /// Member `1` of enumeration number `0`.
    Enum(u16, u16),
    Set(BTreeSet<Value>),
    Tuple(Vec<Value>),
    Array(Rc<ArrayValue>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexSet {
    Range(i64, i64),
    Enum(u16, u16),
}

impl IndexSet {
    fn len(self) -> usize {
        match self {
            IndexSet::Range(lo, hi) => (hi - lo + 1).max(0) as usize,
            IndexSet::Enum(_, n) => n as usize,
        }
    }

    fn offset(self, v: &Value) -> Option<usize> {
        match (self, v) {
            (IndexSet::Range(lo, hi), Value::Int(i)) if *i >= lo && *i <= hi => Some((i - lo) as usize),
            (IndexSet::Enum(t, n), Value::Enum(u, m)) if t == *u && *m < n => Some(*m as usize),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrayValue {
    pub index: Vec<IndexSet>,
    /// Row-major.
    pub data: Vec<Value>,
}

impl ArrayValue {
    pub fn new(index: Vec<IndexSet>, data: Vec<Value>) -> ArrayValue {
        debug_assert_eq!(index.iter().map(|i| i.len()).product::<usize>(), data.len());
        ArrayValue { index, data }
    }

    fn get(&self, idx: &[Value]) -> Option<&Value> {
        if idx.len() != self.index.len() {
            return None;
        }
        let mut off = 0;
        for (set, v) in self.index.iter().zip(idx) {
            off = off * set.len() + set.offset(v)?;
        }
        self.data.get(off)
    }
}

/// A constraint that evaluated to false, with the quantifier bindings of the
/// first failing instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub line: usize,
    pub bindings: Vec<(String, String)>,
}

#[derive(Debug)]
pub struct LoadedModel {
    enums: Vec<(String, Vec<String>)>,
    members: HashMap<String, Value>,
    params: HashMap<String, Value>,
    vars: Vec<(String, TypeInst)>,
    constraints: Vec<Located<Expr>>,
}

struct Scope<'a> {
    model: &'a LoadedModel,
    vars: &'a HashMap<String, Value>,
    locals: Vec<(String, Value)>,
}

impl LoadedModel {
    pub fn load(model: &str, data: &str) -> Result<LoadedModel, ModelError> {
        let model_items = parse(model).map_err(ModelError::ModelSyntax)?;
        let data_items = parse(data).map_err(ModelError::DataSyntax)?;
        let mut assigned: BTreeMap<String, Expr> = BTreeMap::new();
        for it in data_items.iter().chain(&model_items) {
            if let Item::Assign { name, value } = &it.item {
                if assigned.insert(name.clone(), value.clone()).is_some() {
                    return Err(ModelError::Redefined(name.clone()));
                }
            }
        }
        let mut m = LoadedModel {
            enums: Vec::new(),
            members: HashMap::new(),
            params: HashMap::new(),
            vars: Vec::new(),
            constraints: Vec::new(),
        };
        for it in &model_items {
            match &it.item {
                Item::Enum { name, members } => {
                    let members = match (members, assigned.remove(name)) {
                        (Some(m), None) => m.clone(),
                        (None, Some(Expr::Set(items))) => items
                            .into_iter()
                            .map(|e| match e {
                                Expr::Ident(s) => Ok(s),
                                _ => Err(ModelError::Type(format!("enum `{name}` members must be identifiers"))),
                            })
                            .collect::<Result<_, _>>()?,
                        (None, None) => return Err(ModelError::Unassigned(name.clone())),
                        _ => return Err(ModelError::Redefined(name.clone())),
                    };
                    let t = m.enums.len() as u16;
                    for (i, member) in members.iter().enumerate() {
                        if m.members.insert(member.clone(), Value::Enum(t, i as u16)).is_some() {
                            return Err(ModelError::Redefined(member.clone()));
                        }
                    }
                    m.enums.push((name.clone(), members));
                }
                Item::Decl { ty, name, value } => {
                    if m.params.contains_key(name) || m.vars.iter().any(|(v, _)| v == name) {
                        return Err(ModelError::Redefined(name.clone()));
                    }
                    if ty.is_var() {
                        if value.is_some() {
                            return Err(ModelError::Type(format!("`{name}` is a variable with a fixed value")));
                        }
                        m.vars.push((name.clone(), ty.clone()));
                        continue;
                    }
                    let expr = match (value, assigned.remove(name)) {
                        (Some(e), None) => e.clone(),
                        (None, Some(e)) => e,
                        (None, None) => return Err(ModelError::Unassigned(name.clone())),
                        (Some(_), Some(_)) => return Err(ModelError::Redefined(name.clone())),
                    };
                    let empty = HashMap::new();
                    let v = m.scope(&empty).eval(&expr)?;
                    let v = m.coerce(ty, v, name)?;
                    m.params.insert(name.clone(), v);
                }
                Item::Constraint(e) => m.constraints.push(Located { item: e.clone(), line: it.line }),
                Item::Assign { .. } | Item::Include(_) | Item::Solve(_) | Item::Output(_) => {}
            }
        }
        if let Some(name) = assigned.into_keys().next() {
            return Err(ModelError::Unknown(name));
        }
        Ok(m)
    }

    fn scope<'a>(&'a self, vars: &'a HashMap<String, Value>) -> Scope<'a> {
        Scope { model: self, vars, locals: Vec::new() }
    }

    pub fn enum_members(&self, name: &str) -> Option<&[String]> {
        self.enums.iter().find(|(n, _)| n == name).map(|(_, m)| m.as_slice())
    }

    pub fn member(&self, name: &str) -> Option<&Value> {
        self.members.get(name)
    }

    pub fn param(&self, name: &str) -> Option<&Value> {
        self.params.get(name)
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|(n, _)| n.as_str())
    }

    /// Index sets of an array declaration, evaluated against the parameters
    /// (and already supplied variables, for bounds like `0..n`).
    pub fn index_sets(&self, name: &str, vars: &HashMap<String, Value>) -> Result<Vec<IndexSet>, ModelError> {
        let (_, ty) = self.vars.iter().find(|(n, _)| n == name).ok_or_else(|| ModelError::Unknown(name.into()))?;
        match ty {
            TypeInst::Array(dims, _) => dims.iter().map(|d| self.index_set(d, vars, None)).collect(),
            _ => Err(ModelError::Type(format!("`{name}` is not an array"))),
        }
    }

    fn index_set(&self, ty: &TypeInst, vars: &HashMap<String, Value>, len: Option<usize>) -> Result<IndexSet, ModelError> {
        match ty {
            TypeInst::Named(n) => {
                let t = self.enums.iter().position(|(e, _)| e == n).ok_or_else(|| ModelError::Unknown(n.clone()))?;
                Ok(IndexSet::Enum(t as u16, self.enums[t].1.len() as u16))
            }
            TypeInst::Range(lo, hi) => {
                let mut s = self.scope(vars);
                Ok(IndexSet::Range(s.int(lo)?, s.int(hi)?))
            }
            TypeInst::Int => Ok(IndexSet::Range(1, len.unwrap_or(0) as i64)),
            _ => Err(ModelError::Type("unsupported index set".into())),
        }
    }

    fn coerce(&self, ty: &TypeInst, v: Value, name: &str) -> Result<Value, ModelError> {
        let TypeInst::Array(dims, _) = ty else { return Ok(v) };
        let Value::Array(arr) = v else { return Err(ModelError::Type(format!("`{name}` expects an array"))) };
        let empty = HashMap::new();
        let index = dims
            .iter()
            .map(|d| self.index_set(d, &empty, Some(arr.data.len())))
            .collect::<Result<Vec<_>, _>>()?;
        if index.iter().map(|i| i.len()).product::<usize>() != arr.data.len() {
            return Err(ModelError::Type(format!("`{name}` has {} elements, expected another count", arr.data.len())));
        }
        Ok(Value::Array(Rc::new(ArrayValue::new(index, arr.data.clone()))))
    }

    /// Every constraint that does not hold under `vars`.
    pub fn violations(&self, vars: &HashMap<String, Value>) -> Result<Vec<Violation>, ModelError> {
        if let Some((name, _)) = self.vars.iter().find(|(n, _)| !vars.contains_key(n)) {
            return Err(ModelError::MissingVariable(name.clone()));
        }
        let mut out = Vec::new();
        for c in &self.constraints {
            let mut scope = self.scope(vars);
            if let Some(bindings) = scope.first_failure(&c.item)? {
                out.push(Violation { line: c.line, bindings });
            }
        }
        Ok(out)
    }

    fn show(&self, v: &Value) -> String {
        match v {
            Value::Bool(b) => b.to_string(),
            Value::Int(i) => i.to_string(),
            Value::Enum(t, i) => self.enums[*t as usize].1[*i as usize].clone(),
            Value::Set(s) => format!("{{{}}}", s.iter().map(|x| self.show(x)).collect::<Vec<_>>().join(", ")),
            Value::Tuple(t) => format!("({})", t.iter().map(|x| self.show(x)).collect::<Vec<_>>().join(", ")),
            Value::Array(a) => format!("[{}]", a.data.iter().map(|x| self.show(x)).collect::<Vec<_>>().join(", ")),
        }
    }
}

fn type_err(what: &str, v: &Value) -> ModelError {
    ModelError::Type(format!("expected {what}, got {v:?}"))
}

impl Scope<'_> {
    fn lookup(&self, name: &str) -> Result<Value, ModelError> {
        if let Some((_, v)) = self.locals.iter().rev().find(|(n, _)| n == name) {
            return Ok(v.clone());
        }
        self.model
            .params
            .get(name)
            .or_else(|| self.vars.get(name))
            .or_else(|| self.model.members.get(name))
            .cloned()
            .ok_or_else(|| ModelError::Unknown(name.to_string()))
    }

    fn int(&mut self, e: &Expr) -> Result<i64, ModelError> {
        match self.eval(e)? {
            Value::Int(i) => Ok(i),
            v => Err(type_err("an integer", &v)),
        }
    }

    fn bool(&mut self, e: &Expr) -> Result<bool, ModelError> {
        match self.eval(e)? {
            Value::Bool(b) => Ok(b),
            v => Err(type_err("a boolean", &v)),
        }
    }

    fn set(&mut self, e: &Expr) -> Result<BTreeSet<Value>, ModelError> {
        match self.eval(e)? {
            Value::Set(s) => Ok(s),
            v => Err(type_err("a set", &v)),
        }
    }

    /// `None` if `e` holds; otherwise the bindings of the first failing
    /// instance of a top-level `forall`.
    fn first_failure(&mut self, e: &Expr) -> Result<Option<Vec<(String, String)>>, ModelError> {
        if let Expr::Quant { name, gens, filter, body } = e {
            if name == "forall" {
                let mut failure = None;
                self.each(gens, &mut |s| {
                    if let Some(f) = filter {
                        if !s.bool(f)? {
                            return Ok(true);
                        }
                    }
                    if s.bool(body)? {
                        return Ok(true);
                    }
                    let shown = s.locals.iter().map(|(n, v)| (n.clone(), s.model.show(v))).collect();
                    failure = Some(shown);
                    Ok(false)
                })?;
                return Ok(failure);
            }
        }
        Ok(if self.bool(e)? { None } else { Some(Vec::new()) })
    }

    /// Calls `f` for every binding of the generators until it returns false.
    fn each(
        &mut self,
        gens: &[(String, Expr)],
        f: &mut dyn FnMut(&mut Self) -> Result<bool, ModelError>,
    ) -> Result<bool, ModelError> {
        let Some(((var, src), rest)) = gens.split_first() else { return f(self) };
        let items: Vec<Value> = match self.eval(src)? {
            Value::Set(s) => s.into_iter().collect(),
            Value::Array(a) => a.data.clone(),
            v => return Err(type_err("a set or array to iterate", &v)),
        };
        for item in items {
            self.locals.push((var.clone(), item));
            let go_on = self.each(rest, f);
            self.locals.pop();
            if !go_on? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn eval(&mut self, e: &Expr) -> Result<Value, ModelError> {
        Ok(match e {
            Expr::Int(i) => Value::Int(*i),
            Expr::Ident(name) => match name.as_str() {
                "true" => Value::Bool(true),
                "false" => Value::Bool(false),
                _ => self.lookup(name)?,
            },
            Expr::Set(items) => Value::Set(items.iter().map(|x| self.eval(x)).collect::<Result<_, _>>()?),
            Expr::Array(items) => {
                let data: Vec<Value> = items.iter().map(|x| self.eval(x)).collect::<Result<_, _>>()?;
                Value::Array(Rc::new(ArrayValue::new(vec![IndexSet::Range(1, data.len() as i64)], data)))
            }
            Expr::Tuple(items) => Value::Tuple(items.iter().map(|x| self.eval(x)).collect::<Result<_, _>>()?),
            Expr::Index(arr, idx) => {
                let a = match self.eval(arr)? {
                    Value::Array(a) => a,
                    v => return Err(type_err("an array", &v)),
                };
                let idx: Vec<Value> = idx.iter().map(|x| self.eval(x)).collect::<Result<_, _>>()?;
                a.get(&idx).cloned().ok_or_else(|| ModelError::Index {
                    array: format!("{arr:?}"),
                    index: idx.iter().map(|v| self.model.show(v)).collect::<Vec<_>>().join(", "),
                })?
            }
            Expr::Field(t, k) => match self.eval(t)? {
                Value::Tuple(items) if *k <= items.len() => items[k - 1].clone(),
                v => return Err(type_err(&format!("a tuple with field {k}"), &v)),
            },
            Expr::Not(x) => Value::Bool(!self.bool(x)?),
            Expr::Neg(x) => Value::Int(-self.int(x)?),
            Expr::Quant { name, gens, filter, body } => {
                let exists = name == "exists";
                let mut hit = false;
                self.each(gens, &mut |s| {
                    if let Some(f) = filter {
                        if !s.bool(f)? {
                            return Ok(true);
                        }
                    }
                    let b = s.bool(body)?;
                    if b == exists {
                        hit = true;
                        return Ok(false);
                    }
                    Ok(true)
                })?;
                Value::Bool(if exists { hit } else { !hit })
            }
            Expr::Binary(op, l, r) => self.binary(op, l, r)?,
        })
    }

    fn binary(&mut self, op: &str, l: &Expr, r: &Expr) -> Result<Value, ModelError> {
        let b = Value::Bool;
        Ok(match op {
            "/\\" => b(self.bool(l)? && self.bool(r)?),
            "\\/" => b(self.bool(l)? || self.bool(r)?),
            "->" => b(!self.bool(l)? || self.bool(r)?),
            "<->" => b(self.bool(l)? == self.bool(r)?),
            "=" | "==" => b(self.eval(l)? == self.eval(r)?),
            "!=" => b(self.eval(l)? != self.eval(r)?),
            "<" | "<=" | ">" | ">=" => {
                let (x, y) = (self.eval(l)?, self.eval(r)?);
                let comparable = matches!((&x, &y), (Value::Int(_), Value::Int(_)))
                    || matches!((&x, &y), (Value::Enum(s, _), Value::Enum(t, _)) if s == t);
                if !comparable {
                    return Err(ModelError::Type(format!("cannot compare {x:?} and {y:?}")));
                }
                b(match op {
                    "<" => x < y,
                    "<=" => x <= y,
                    ">" => x > y,
                    _ => x >= y,
                })
            }
            "in" => {
                let x = self.eval(l)?;
                b(self.set(r)?.contains(&x))
            }
            "subset" => {
                let x = self.set(l)?;
                b(x.is_subset(&self.set(r)?))
            }
            "superset" => {
                let x = self.set(l)?;
                b(x.is_superset(&self.set(r)?))
            }
            "union" => {
                let mut x = self.set(l)?;
                x.extend(self.set(r)?);
                Value::Set(x)
            }
            "diff" => {
                let x = self.set(l)?;
                let y = self.set(r)?;
                Value::Set(x.difference(&y).cloned().collect())
            }
            "intersect" => {
                let x = self.set(l)?;
                let y = self.set(r)?;
                Value::Set(x.intersection(&y).cloned().collect())
            }
            ".." => {
                let (lo, hi) = (self.int(l)?, self.int(r)?);
                Value::Set((lo..=hi).map(Value::Int).collect())
            }
            "-" => Value::Int(self.int(l)? - self.int(r)?),
            _ => return Err(ModelError::Type(format!("unsupported operator `{op}`"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MODEL: &str = "enum Color;\nint: k = 2;\narray[Color] of set of Color: next;\narray[1..k] of var Color: pick;\n\
constraint forall(i in 2..k)(pick[i] in next[pick[i-1]]);\nconstraint pick[1] != pick[k];\nsolve satisfy;\n";
    const DATA: &str = "Color = { Red, Green, Blue };\nnext = [{Green}, {Blue}, {Red}];\n";

    fn assign(m: &LoadedModel, a: &str, b: &str) -> HashMap<String, Value> {
        let idx = m.index_sets("pick", &HashMap::new()).unwrap();
        let data = vec![m.member(a).unwrap().clone(), m.member(b).unwrap().clone()];
        HashMap::from([("pick".to_string(), Value::Array(Rc::new(ArrayValue::new(idx, data))))])
    }

    #[test]
    fn satisfied_and_violated_assignments() {
        let m = LoadedModel::load(MODEL, DATA).unwrap();
        assert!(m.violations(&assign(&m, "Red", "Green")).unwrap().is_empty());
        let v = m.violations(&assign(&m, "Red", "Blue")).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].line, 5);
        assert_eq!(v[0].bindings, vec![("i".to_string(), "2".to_string())]);
    }

    #[test]
    fn load_errors() {
        assert_eq!(
            LoadedModel::load(MODEL, "Color = { Red };\n").unwrap_err(),
            ModelError::Unassigned("next".into())
        );
        assert!(matches!(
            LoadedModel::load(MODEL, "Color = { Red, Green };\nnext = [{Green}];\n"),
            Err(ModelError::Type(_))
        ));
        assert_eq!(
            LoadedModel::load(MODEL, &format!("{DATA}extra = 1;\n")).unwrap_err(),
            ModelError::Unknown("extra".into())
        );
        let m = LoadedModel::load(MODEL, DATA).unwrap();
        assert_eq!(m.violations(&HashMap::new()).unwrap_err(), ModelError::MissingVariable("pick".into()));
    }

    #[test]
    fn tuples_and_quantifiers() {
        let model = "enum E;\narray[int] of tuple(E, E): pairs;\nconstraint exists(t in pairs)(t = (b, a));\n\
constraint forall(t in pairs)(t.1 != t.2);\n";
        let m = LoadedModel::load(model, "E = { a, b };\npairs = [(a, b), (b, a)];\n").unwrap();
        assert!(m.violations(&HashMap::new()).unwrap().is_empty());
        let m = LoadedModel::load(model, "E = { a, b };\npairs = [];\n").unwrap();
        assert_eq!(m.violations(&HashMap::new()).unwrap().len(), 1);
    }
}

//! Text interchange: DGA JSON files and simplicial facet lists.

use serde::{Deserialize, Serialize};

use crate::dga::{unit_products, BasisElement, DGAlgebra, Table};
use crate::error::{Error, Result};
use crate::lin::{Coeff, Vector};
use crate::ring::RingTag;
use crate::simplicial::SimplicialComplex;

#[derive(Debug, Serialize, Deserialize)]
struct BasisEntry {
    name: String,
    degree: usize,
}

type Triple = (String, String, String, Coeff);

/// On-disk layout. Differential entries read `[source, target, coeff]`; product
/// and cup-one entries read `[left, right, result, coeff]`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DgaFile {
    ring: RingTag,
    basis: Vec<BasisEntry>,
    #[serde(default)]
    differential: Vec<(String, String, Coeff)>,
    #[serde(default)]
    product: Vec<Triple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cup_one: Option<Vec<Triple>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unit: Option<Vec<(String, Coeff)>>,
    augmentation: Vec<(String, Coeff)>,
}

pub fn dga_to_json(a: &DGAlgebra) -> String {
    let name = |i: usize| a.name(i).to_string();
    let triples = |t: &Table| -> Vec<Triple> {
        t.iter()
            .flat_map(|(&(i, j), v)| v.iter().map(move |(&k, c)| (name(i), name(j), name(k), Coeff(c.clone()))))
            .collect()
    };
    let pairs = |v: &Vector| v.iter().map(|(&k, c)| (name(k), Coeff(c.clone()))).collect::<Vec<_>>();
    let file = DgaFile {
        ring: a.ring(),
        basis: a.basis().iter().map(|b| BasisEntry { name: b.name.clone(), degree: b.degree }).collect(),
        differential: (0..a.dim())
            .flat_map(|i| a.d_basis(i).iter().map(move |(&k, c)| (name(i), name(k), Coeff(c.clone()))))
            .collect(),
        product: triples(a.product_table()),
        cup_one: a.cup_one_table().map(triples),
        unit: Some(pairs(a.unit())),
        augmentation: pairs(a.augmentation()),
    };
    serde_json::to_string_pretty(&file).expect("serializable") + "\n"
}

/// Parses a DGA file. Without a `unit` field the element named "1" is the unit,
/// and its products are filled in when the file lists none.
pub fn dga_from_json(text: &str) -> Result<DGAlgebra> {
    let f: DgaFile = serde_json::from_str(text)?;
    let ring = f.ring;
    let basis: Vec<BasisElement> = f.basis.into_iter().map(|b| BasisElement { name: b.name, degree: b.degree }).collect();
    let index = |s: &str| {
        basis
            .iter()
            .position(|b| b.name == s)
            .ok_or_else(|| Error::Parse(format!("unknown basis element '{s}'")))
    };
    let mut diff = vec![Vector::new(); basis.len()];
    for (s, t, Coeff(c)) in &f.differential {
        diff[index(s)?].add_term(index(t)?, c, ring);
    }
    let table = |entries: &[Triple]| -> Result<Table> {
        let mut t = Table::new();
        for (l, r, out, Coeff(c)) in entries {
            t.entry((index(l)?, index(r)?)).or_default().add_term(index(out)?, c, ring);
        }
        Ok(t)
    };
    let mut product = table(&f.product)?;
    let pairs = |entries: &[(String, Coeff)]| -> Result<Vector> {
        let mut v = Vector::new();
        for (k, Coeff(c)) in entries {
            v.add_term(index(k)?, c, ring);
        }
        Ok(v)
    };
    let unit = match &f.unit {
        Some(u) => pairs(u)?,
        None => {
            let u = index("1").map_err(|_| Error::Parse("no unit given and no basis element named '1'".into()))?;
            if !product.keys().any(|&(i, j)| i == u || j == u) {
                let n = basis.len();
                let swap = |k: usize| if k == 0 { u } else if k == u { 0 } else { k };
                for ((i, j), v) in unit_products(n) {
                    product.insert((swap(i), swap(j)), v.map_keys(|&k| swap(k), ring));
                }
            }
            Vector::single(u)
        }
    };
    let cup_one = f.cup_one.as_deref().map(table).transpose()?;
    let augmentation = pairs(&f.augmentation)?;
    DGAlgebra::new(ring, basis, diff, product, unit, augmentation, cup_one)
}

/// One facet per line, whitespace-separated vertex labels; `#` starts a comment line.
pub fn parse_facets(text: &str) -> Result<SimplicialComplex> {
    let mut facets = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let facet = line
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("line {}: bad vertex '{t}'", lineno + 1))))
            .collect::<Result<Vec<_>>>()?;
        facets.push(facet);
    }
    SimplicialComplex::from_facets(facets)
}

pub fn facets_to_text(k: &SimplicialComplex) -> String {
    k.facets()
        .iter()
        .map(|f| f.iter().map(usize::to_string).collect::<Vec<_>>().join(" ") + "\n")
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::simplicial::cochain_algebra;

    #[test]
    fn round_trip_is_identity() {
        for a in [
            presets::moore(3, 2).unwrap(),
            presets::parse_preset("tensor(truncated_poly(2,3),exterior(3))").unwrap(),
            cochain_algebra(&SimplicialComplex::boundary_of_simplex(3).unwrap(), RingTag::Integers).unwrap(),
        ] {
            let text = dga_to_json(&a);
            let b = dga_from_json(&text).unwrap();
            assert_eq!(a, b);
            assert_eq!(dga_to_json(&b), text);
        }
    }

    #[test]
    fn minimal_file_with_implicit_unit() {
        let text = r#"{
            "ring": "Z",
            "basis": [{"name": "u", "degree": 2}, {"name": "1", "degree": 0}, {"name": "v", "degree": 3}],
            "differential": [["u", "v", 5]],
            "augmentation": [["1", 1]]
        }"#;
        let a = dga_from_json(text).unwrap();
        assert!(a.check_invariants().all_passed());
        assert_eq!(a.unit(), &Vector::single(1));
    }

    #[test]
    fn big_coefficients_survive() {
        let text = r#"{"ring": "Z", "basis": [{"name": "1", "degree": 0}, {"name": "u", "degree": 2},
            {"name": "v", "degree": 3}], "differential": [["u", "v", "123456789012345678901234567890"]],
            "augmentation": [["1", 1]]}"#;
        let a = dga_from_json(text).unwrap();
        assert_eq!(dga_from_json(&dga_to_json(&a)).unwrap(), a);
        assert!(dga_to_json(&a).contains("\"123456789012345678901234567890\""));
    }

    #[test]
    fn facets_parse_with_comments() {
        let k = parse_facets("# sphere\n0 1 2\n0 1 3\n0 2 3\n1 2 3\n").unwrap();
        assert_eq!(k.f_vector(), vec![4, 6, 4]);
        assert_eq!(parse_facets(&facets_to_text(&k)).unwrap(), k);
        assert!(parse_facets("0 x\n").is_err());
        assert!(parse_facets("2 1\n").is_err());
    }
}

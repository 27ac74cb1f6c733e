//! Named integral DG algebra models and tensor products.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::dga::{unit_products, BasisElement, DGAlgebra, Table};
use crate::error::{Error, Result};
use crate::lin::{sign, Vector};
use crate::ring::RingTag;

const Z: RingTag = RingTag::Integers;

fn el(name: &str, degree: usize) -> BasisElement {
    BasisElement { name: name.to_string(), degree }
}

fn finish(basis: Vec<BasisElement>, diff: Vec<Vector>, mut product: Table, commutative_cup_one: bool) -> Result<DGAlgebra> {
    for (k, v) in unit_products(basis.len()) {
        product.insert(k, v);
    }
    let cup = commutative_cup_one.then(Table::new);
    DGAlgebra::new(Z, basis, diff, product, Vector::single(0), Vector::single(0), cup)
}

fn term(i: usize, c: i64) -> Vector {
    Vector::from_terms([(i, BigInt::from(c))], Z)
}

/// One-cell model Λ(x_n) with x² = 0.
pub fn sphere(n: usize) -> Result<DGAlgebra> {
    if n == 0 {
        return Err(Error::Precondition("sphere dimension must be positive".into()));
    }
    finish(vec![el("1", 0), el("x", n)], vec![Vector::new(); 2], Table::new(), true)
}

/// Square-zero algebra with one generator per listed degree.
pub fn wedge_of_spheres(dims: &[usize]) -> Result<DGAlgebra> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Precondition("wedge needs positive sphere dimensions".into()));
    }
    let mut basis = vec![el("1", 0)];
    for (i, &d) in dims.iter().enumerate() {
        basis.push(el(&format!("x{}", i + 1), d));
    }
    let n = basis.len();
    finish(basis, vec![Vector::new(); n], Table::new(), true)
}

/// Square-zero integral model Z·1 ⊕ Z·u_n ⊕ Z·v_{n+1} with du = p·v.
pub fn moore(p: u64, n: usize) -> Result<DGAlgebra> {
    if !crate::ring::is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    if n == 0 {
        return Err(Error::Precondition("Moore model degree must be positive".into()));
    }
    let diff = vec![Vector::new(), term(2, p as i64), Vector::new()];
    finish(vec![el("1", 0), el("u", n), el("v", n + 1)], diff, Table::new(), true)
}

/// k[x]/(x^height) with |x| = n.
pub fn truncated_poly(n: usize, height: usize) -> Result<DGAlgebra> {
    if n == 0 || height < 2 {
        return Err(Error::Precondition("truncated polynomial needs n >= 1 and height >= 2".into()));
    }
    let mut basis = vec![el("1", 0), el("x", n)];
    for k in 2..height {
        basis.push(el(&format!("x{k}"), n * k));
    }
    let mut product = Table::new();
    for a in 1..height {
        for b in 1..height {
            if a + b < height {
                product.insert((a, b), term(a + b, 1));
            }
        }
    }
    // strictly graded-commutative unless x is odd with x^2 != 0
    let commutative = n.is_multiple_of(2) || height == 2;
    finish(basis, vec![Vector::new(); height], product, commutative)
}

/// Exterior algebra on generators of the given degrees (x_i² = 0).
pub fn exterior(degrees: &[usize]) -> Result<DGAlgebra> {
    if degrees.is_empty() || degrees.contains(&0) {
        return Err(Error::Precondition("exterior algebra needs positive generator degrees".into()));
    }
    let k = degrees.len();
    let mut subsets: Vec<Vec<usize>> = (0u32..(1 << k))
        .map(|mask| (0..k).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    subsets.sort_by_key(|s| (s.iter().map(|&i| degrees[i]).sum::<usize>(), s.len(), s.clone()));
    let name = |s: &Vec<usize>| {
        if s.is_empty() {
            "1".to_string()
        } else {
            s.iter().map(|i| format!("x{}", i + 1)).collect::<Vec<_>>().join("")
        }
    };
    let basis: Vec<BasisElement> = subsets.iter().map(|s| el(&name(s), s.iter().map(|&i| degrees[i]).sum())).collect();
    let index = |s: &[usize]| subsets.iter().position(|t| t == s).expect("subset present");
    let mut product = Table::new();
    for (a, s) in subsets.iter().enumerate() {
        for (b, t) in subsets.iter().enumerate() {
            let ss: BTreeSet<_> = s.iter().collect();
            if s.is_empty() || t.is_empty() || t.iter().any(|x| ss.contains(x)) {
                continue;
            }
            let mut e = 0i64;
            for &x in s {
                for &y in t {
                    if y < x {
                        e += (degrees[x] * degrees[y]) as i64;
                    }
                }
            }
            let mut u: Vec<usize> = s.iter().chain(t.iter()).copied().collect();
            u.sort();
            product.insert((a, b), Vector::from_terms([(index(&u), sign(e))], Z));
        }
    }
    let n = basis.len();
    finish(basis, vec![Vector::new(); n], product, true)
}

/// Graded tensor product with Koszul signs; carries no cup-one table.
pub fn tensor(a: &DGAlgebra, b: &DGAlgebra) -> Result<DGAlgebra> {
    if a.ring() != b.ring() {
        return Err(Error::Ring("tensor factors over different rings".into()));
    }
    let ring = a.ring();
    let (na, nb) = (a.dim(), b.dim());
    let idx = |i: usize, j: usize| i * nb + j;
    let wrap = |x: &str| if x.contains('*') { format!("({x})") } else { x.to_string() };
    let names = |primes: usize| -> Vec<String> {
        let bname = |j: usize| if b.name(j) == "1" { "1".to_string() } else { format!("{}{}", wrap(b.name(j)), "'".repeat(primes)) };
        (0..na)
            .flat_map(|i| (0..nb).map(move |j| (i, j)))
            .map(|(i, j)| match (a.name(i), bname(j).as_str()) {
                ("1", "1") => "1".to_string(),
                ("1", y) => y.to_string(),
                (x, "1") => x.to_string(),
                (x, y) => format!("{}*{y}", wrap(x)),
            })
            .collect()
    };
    let distinct = |v: &[String]| v.iter().collect::<BTreeSet<_>>().len() == v.len();
    let chosen = (0..4).map(names).find(|v| distinct(v)).unwrap_or_else(|| {
        (0..na * nb).map(|k| if k == 0 { "1".to_string() } else { format!("e{}_{}", k / nb, k % nb) }).collect()
    });
    let basis: Vec<BasisElement> =
        chosen.iter().enumerate().map(|(k, name)| el(name, a.degree(k / nb) + b.degree(k % nb))).collect();
    let mut diff = vec![Vector::new(); na * nb];
    for i in 0..na {
        for j in 0..nb {
            let d = &mut diff[idx(i, j)];
            for (&k, c) in a.d_basis(i).iter() {
                d.add_term(idx(k, j), c, ring);
            }
            let s = sign(a.degree(i) as i64);
            for (&k, c) in b.d_basis(j).iter() {
                d.add_term(idx(i, k), &(c * &s), ring);
            }
        }
    }
    let mut product = Table::new();
    for (&(i1, i2), pa) in a.product_table() {
        for (&(j1, j2), pb) in b.product_table() {
            let s = sign((b.degree(j1) * a.degree(i2)) as i64);
            let mut v = Vector::new();
            for (&x, c) in pa.iter() {
                for (&y, e) in pb.iter() {
                    v.add_term(idx(x, y), &(c * e * &s), ring);
                }
            }
            if !v.is_zero() {
                product.insert((idx(i1, j1), idx(i2, j2)), v);
            }
        }
    }
    let tensor_vec = |u: &Vector, w: &Vector| {
        let mut v = Vector::new();
        for (&x, c) in u.iter() {
            for (&y, e) in w.iter() {
                v.add_term(idx(x, y), &(c * e), ring);
            }
        }
        v
    };
    let unit = tensor_vec(a.unit(), b.unit());
    let aug = tensor_vec(a.augmentation(), b.augmentation());
    DGAlgebra::new(ring, basis, diff, product, unit, aug, None)
}

/// Parses expressions such as `tensor(truncated_poly(2,2),sphere(3))`.
pub fn parse_preset(expr: &str) -> Result<DGAlgebra> {
    let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let (alg, rest) = parse_expr(&s)?;
    if !rest.is_empty() {
        return Err(Error::Parse(format!("trailing input '{rest}' in preset")));
    }
    Ok(alg)
}

enum Arg {
    Num(usize),
    Alg(Box<DGAlgebra>),
}

fn parse_expr(s: &str) -> Result<(DGAlgebra, &str)> {
    let open = s.find('(').ok_or_else(|| Error::UnknownPreset(s.to_string()))?;
    let name = &s[..open];
    let mut rest = &s[open + 1..];
    let mut args = Vec::new();
    loop {
        if let Some(r) = rest.strip_prefix(')') {
            rest = r;
            break;
        }
        let digits = rest.chars().take_while(char::is_ascii_digit).count();
        if digits > 0 {
            args.push(Arg::Num(rest[..digits].parse().expect("digits")));
            rest = &rest[digits..];
        } else {
            let (a, r) = parse_expr(rest)?;
            args.push(Arg::Alg(Box::new(a)));
            rest = r;
        }
        if let Some(r) = rest.strip_prefix(',') {
            rest = r;
        } else if !rest.starts_with(')') {
            return Err(Error::Parse(format!("expected ',' or ')' in preset near '{rest}'")));
        }
    }
    let nums = || -> Result<Vec<usize>> {
        args.iter()
            .map(|a| match a {
                Arg::Num(n) => Ok(*n),
                Arg::Alg(_) => Err(Error::Parse(format!("{name} takes numeric arguments"))),
            })
            .collect()
    };
    let alg = match name {
        "sphere" => match nums()?.as_slice() {
            [n] => sphere(*n)?,
            _ => return Err(Error::Parse("sphere(n)".into())),
        },
        "wedge_of_spheres" | "wedge" => wedge_of_spheres(&nums()?)?,
        "moore" => match nums()?.as_slice() {
            [p, n] => moore(*p as u64, *n)?,
            _ => return Err(Error::Parse("moore(p, n)".into())),
        },
        "truncated_poly" => match nums()?.as_slice() {
            [n, h] => truncated_poly(*n, *h)?,
            _ => return Err(Error::Parse("truncated_poly(n, height)".into())),
        },
        "exterior" => exterior(&nums()?)?,
        "tensor" => {
            let mut algs = args.into_iter().map(|a| match a {
                Arg::Alg(a) => Ok(*a),
                Arg::Num(_) => Err(Error::Parse("tensor takes algebra arguments".into())),
            });
            let first = algs.next().ok_or_else(|| Error::Parse("tensor needs arguments".into()))??;
            let mut acc = first;
            let mut count = 1;
            for a in algs {
                acc = tensor(&acc, &a?)?;
                count += 1;
            }
            if count < 2 {
                return Err(Error::Parse("tensor needs at least two factors".into()));
            }
            acc
        }
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok((alg, rest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_tensor_names_stay_distinct() {
        let x = sphere(2).unwrap();
        let xx = tensor(&x, &x).unwrap();
        for t in [tensor(&xx, &x).unwrap(), tensor(&x, &xx).unwrap(), tensor(&xx, &xx).unwrap()] {
            let names: BTreeSet<_> = t.basis().iter().map(|b| b.name.clone()).collect();
            assert_eq!(names.len(), t.dim());
            assert_eq!(t.name(0), "1");
            assert!(t.check_invariants().all_passed());
        }
    }

    #[test]
    fn presets_pass_invariants() {
        for e in [
            "sphere(3)",
            "wedge(2,3,3)",
            "moore(3,2)",
            "truncated_poly(2,4)",
            "truncated_poly(3,3)",
            "exterior(3,5,2)",
            "tensor(truncated_poly(2,2),sphere(3))",
            "tensor(moore(5,2),exterior(3,3))",
        ] {
            let a = parse_preset(e).unwrap();
            let r = a.check_invariants();
            assert!(r.all_passed(), "{e}: {r:?}");
        }
    }

    #[test]
    fn odd_truncated_poly_has_no_cup_one() {
        assert!(!truncated_poly(3, 3).unwrap().has_cup_one());
        assert!(truncated_poly(3, 2).unwrap().has_cup_one());
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(parse_preset("torus(2)"), Err(Error::UnknownPreset(_))));
        assert!(parse_preset("sphere(3").is_err());
    }
}

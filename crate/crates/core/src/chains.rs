//! Bounded chain complexes, homology and induced maps.

use serde_json::{json, Value};

use crate::category::{Backend, Category, Morphism, Subobject};
use crate::diff::Engine;
use crate::error::{Error, Result};

/// Objects `C_0..C_N` with `d_n : C_n → C_{n-1}` for `1 ≤ n ≤ N`.
///
/// Degrees above `N` are zero; statements about homology are only made for
/// degrees below `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex<B: Backend> {
    objects: Vec<B::Obj>,
    /// `diffs[n - 1] = d_n`.
    diffs: Vec<Morphism<B>>,
}

impl<B: Backend> ChainComplex<B> {
    /// Panics when shapes do not line up; use [`ChainComplex::validate`] for `d∘d`.
    pub fn new(objects: Vec<B::Obj>, diffs: Vec<Morphism<B>>) -> Self {
        assert!(!objects.is_empty(), "a complex needs degree 0");
        assert_eq!(
            diffs.len(),
            objects.len() - 1,
            "one differential per positive degree"
        );
        for (n, d) in diffs.iter().enumerate() {
            assert_eq!(d.dom, objects[n + 1], "d_{} has the wrong domain", n + 1);
            assert_eq!(d.cod, objects[n], "d_{} has the wrong codomain", n + 1);
        }
        Self { objects, diffs }
    }

    pub fn truncation(&self) -> usize {
        self.objects.len() - 1
    }

    pub fn objects(&self) -> &[B::Obj] {
        &self.objects
    }

    pub fn diffs(&self) -> &[Morphism<B>] {
        &self.diffs
    }

    pub fn object(&self, b: &B, n: usize) -> B::Obj {
        self.objects
            .get(n)
            .cloned()
            .unwrap_or_else(|| b.zero_object())
    }

    /// `d_n`; `d_0 : C_0 → 0` and `d_{N+1} : 0 → C_N`.
    pub fn d(&self, b: &B, n: usize) -> Morphism<B> {
        match n {
            0 => b.zero_morphism(&self.objects[0], &b.zero_object()),
            n if n <= self.truncation() => self.diffs[n - 1].clone(),
            n => b.zero_morphism(&b.zero_object(), &self.object(b, n - 1)),
        }
    }

    /// Same objects and differentials in degrees `≤ n`.
    pub fn truncate(&self, n: usize) -> Self {
        let n = n.min(self.truncation());
        Self {
            objects: self.objects[..=n].to_vec(),
            diffs: self.diffs[..n].to_vec(),
        }
    }

    /// First degree `n` with `d_n∘d_{n+1} ≠ 0`.
    pub fn validate(&self, b: &B) -> std::result::Result<(), usize> {
        for n in 1..self.truncation() {
            if !b.is_zero_morphism(&b.compose(&self.diffs[n - 1], &self.diffs[n])) {
                return Err(n);
            }
        }
        Ok(())
    }

    pub fn to_json(&self, b: &B) -> Value {
        json!({
            "objects": self.objects.iter().map(|x| b.object_to_json(x)).collect::<Vec<_>>(),
            "differentials": self.diffs.iter().map(|d| d.matrix.to_json(b.ring())).collect::<Vec<_>>(),
        })
    }

    /// Inverse of [`ChainComplex::to_json`], checking shapes instead of panicking.
    pub fn from_json(b: &B, v: &Value) -> Result<Self> {
        let objects = v
            .get("objects")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("complex needs an `objects` array".into()))?
            .iter()
            .map(|o| b.object_from_json(o))
            .collect::<Result<Vec<_>>>()?;
        if objects.is_empty() {
            return Err(Error::Parse("complex needs at least one object".into()));
        }
        let empty = Vec::new();
        let raw = v
            .get("differentials")
            .and_then(Value::as_array)
            .unwrap_or(&empty);
        if raw.len() + 1 != objects.len() {
            return Err(Error::Parse(format!(
                "{} objects need {} differentials, got {}",
                objects.len(),
                objects.len() - 1,
                raw.len()
            )));
        }
        let diffs = raw
            .iter()
            .enumerate()
            .map(|(n, m)| {
                let (rows, cols) = (b.dim(&objects[n]), b.dim(&objects[n + 1]));
                let m = crate::matrix::Matrix::from_json(b.ring(), m, rows, cols)
                    .map_err(|e| Error::Parse(format!("d_{}: {e}", n + 1)))?;
                b.morphism(&objects[n + 1], &objects[n], m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { objects, diffs })
    }

    pub fn fingerprints(&self, b: &B) -> Vec<crate::category::Fingerprint> {
        self.objects.iter().map(|x| b.fingerprint(x)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap<B: Backend> {
    pub source: ChainComplex<B>,
    pub target: ChainComplex<B>,
    pub components: Vec<Morphism<B>>,
}

impl<B: Backend> ChainMap<B> {
    pub fn new(
        source: ChainComplex<B>,
        target: ChainComplex<B>,
        components: Vec<Morphism<B>>,
    ) -> Self {
        Self {
            source,
            target,
            components,
        }
    }

    pub fn identity(b: &B, c: &ChainComplex<B>) -> Self {
        Self::new(
            c.clone(),
            c.clone(),
            c.objects.iter().map(|x| b.identity(x)).collect(),
        )
    }

    pub fn zero(b: &B, c: &ChainComplex<B>, e: &ChainComplex<B>) -> Self {
        let n = c.truncation().min(e.truncation());
        Self::new(
            c.clone(),
            e.clone(),
            (0..=n)
                .map(|k| b.zero_morphism(&c.objects[k], &e.objects[k]))
                .collect(),
        )
    }

    pub fn degree(&self) -> usize {
        self.components.len() - 1
    }

    /// First degree where `d^E∘f_n ≠ f_{n-1}∘d^C`.
    pub fn validate(&self, b: &B) -> std::result::Result<(), usize> {
        for (n, f) in self.components.iter().enumerate() {
            if f.dom != self.source.objects[n] || f.cod != self.target.objects[n] {
                return Err(n);
            }
            if n == 0 {
                continue;
            }
            let lhs = b.compose(&self.target.d(b, n), f);
            let rhs = b.compose(&self.components[n - 1], &self.source.d(b, n));
            if lhs != rhs {
                return Err(n);
            }
        }
        Ok(())
    }

    /// `self∘first`.
    pub fn compose(&self, b: &B, first: &ChainMap<B>) -> ChainMap<B> {
        let n = self.degree().min(first.degree());
        ChainMap::new(
            first.source.clone(),
            self.target.clone(),
            (0..=n)
                .map(|k| b.compose(&self.components[k], &first.components[k]))
                .collect(),
        )
    }
}

#[derive(Clone, Debug)]
pub struct HomologyCertificate<B: Backend> {
    pub degree: usize,
    /// `Z_n = ker d_n`.
    pub cycles: Subobject<B>,
    /// `d̄_{n+1} : C_{n+1} → Z_n`.
    pub dbar: Morphism<B>,
    pub homology: B::Obj,
    /// `Z_n → H_n`.
    pub projection: Morphism<B>,
}

impl<B: Backend> HomologyCertificate<B> {
    pub fn is_zero(&self, b: &B) -> bool {
        b.dim(&self.homology) == 0
    }
}

/// Kernel of `d`, with the identity when `d` vanishes so that `Z_n = C_n` literally.
pub fn kernel_of<B: Backend>(b: &B, d: &Morphism<B>) -> Subobject<B> {
    if b.is_zero_morphism(d) {
        return Subobject {
            object: d.dom.clone(),
            inclusion: b.identity(&d.dom),
            normality: crate::category::Normality::Normal,
        };
    }
    b.kernel(d)
}

pub fn homology<B: Backend>(
    b: &B,
    c: &ChainComplex<B>,
    n: usize,
) -> Result<HomologyCertificate<B>> {
    if n >= c.truncation() {
        return Err(Error::DegreeOutOfRange {
            degree: n,
            truncation: c.truncation(),
        });
    }
    let cycles = kernel_of(b, &c.d(b, n));
    let dbar = b.factor_through_mono(&c.d(b, n + 1), &cycles.inclusion)?;
    let projection = b.cokernel(&dbar);
    Ok(HomologyCertificate {
        degree: n,
        homology: projection.cod.clone(),
        cycles,
        dbar,
        projection,
    })
}

/// Checks the certificate against its complex.
pub fn check_certificate<B: Backend>(
    b: &B,
    c: &ChainComplex<B>,
    h: &HomologyCertificate<B>,
) -> bool {
    let n = h.degree;
    b.compose(&h.cycles.inclusion, &h.dbar) == c.d(b, n + 1)
        && b.is_zero_morphism(&b.compose(&c.d(b, n), &h.cycles.inclusion))
        && b.is_zero_morphism(&b.compose(&h.projection, &h.dbar))
        && b.is_regular_epi(&h.projection)
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct DegreeFlags {
    pub degree: usize,
    pub proper: bool,
    pub exact: bool,
}

/// Proper at `n`: the image of `d_{n+1}` is normal. Exact at `n`: `d̄_{n+1}` is a regular epi.
pub fn properness_and_exactness<B: Backend>(b: &B, c: &ChainComplex<B>) -> Vec<DegreeFlags> {
    (0..c.truncation())
        .map(|n| {
            let cert = homology(b, c, n).expect("degree in range");
            DegreeFlags {
                degree: n,
                proper: b.is_proper(&c.d(b, n + 1)),
                exact: b.is_regular_epi(&cert.dbar),
            }
        })
        .collect()
}

/// `Z_n(f) : Z_n(C) → Z_n(E)`.
pub fn cycles_map<B: Backend>(
    b: &B,
    f: &Morphism<B>,
    zc: &Subobject<B>,
    ze: &Subobject<B>,
) -> Result<Morphism<B>> {
    b.factor_through_mono(&b.compose(f, &zc.inclusion), &ze.inclusion)
}

/// `H_n(f)`, the unique map with `H_n(f)∘coker(d̄^C) = coker(d̄^E)∘Z_n(f)`.
pub fn induced_homology_map<B: Backend>(
    b: &B,
    f: &ChainMap<B>,
    hc: &HomologyCertificate<B>,
    he: &HomologyCertificate<B>,
) -> Result<Morphism<B>> {
    let n = hc.degree;
    if n > f.degree() {
        return Err(Error::DegreeOutOfRange {
            degree: n,
            truncation: f.degree(),
        });
    }
    let z = cycles_map(b, &f.components[n], &hc.cycles, &he.cycles)?;
    b.factor_through_epi(&b.compose(&he.projection, &z), &hc.projection)
}

pub fn induced_homology_map_at<B: Backend>(
    b: &B,
    f: &ChainMap<B>,
    n: usize,
) -> Result<Morphism<B>> {
    let hc = homology(b, &f.source, n)?;
    let he = homology(b, &f.target, n)?;
    induced_homology_map(b, f, &hc, &he)
}

#[derive(Clone, Debug)]
pub struct KernelComparison<B: Backend> {
    /// `k_n : D(Z_n) → Z_n(D(C))`.
    pub k: Morphism<B>,
    pub mono: bool,
    pub epi: bool,
    /// `Z_n(f − g)∘k_n = Z_n(f) − Z_n(g)`.
    pub equation_holds: bool,
}

/// Comparison between `D` of the cycles and the cycles of the degreewise `D`.
pub fn kernel_comparison<B: Backend>(
    e: &Engine<B>,
    f: &ChainMap<B>,
    g: &ChainMap<B>,
    n: usize,
) -> Result<KernelComparison<B>> {
    let c = &f.source;
    let t = &f.target;
    if n >= c.truncation() || n > f.degree() || n > g.degree() {
        return Err(Error::DegreeOutOfRange {
            degree: n,
            truncation: c.truncation(),
        });
    }
    let zc = kernel_of(&**e, &c.d(e, n));
    let ze = kernel_of(&**e, &t.d(e, n));
    let dd = e.d_morphism(&c.d(e, n))?;
    let kd = kernel_of(&**e, &dd);
    let dk = e.d_morphism(&zc.inclusion)?;
    let k = e.factor_through_mono(&dk, &kd.inclusion)?;
    let fg = e.approx_difference(&f.components[n], &g.components[n])?;
    let z_fg = e.factor_through_mono(&e.compose(&fg, &kd.inclusion), &ze.inclusion)?;
    let zf = cycles_map(&**e, &f.components[n], &zc, &ze)?;
    let zg = cycles_map(&**e, &g.components[n], &zc, &ze)?;
    let rhs = e.approx_difference(&zf, &zg)?;
    Ok(KernelComparison {
        mono: e.is_mono(&k),
        epi: e.is_regular_epi(&k),
        equation_holds: e.compose(&z_fg, &k) == rhs,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::lie2::Lie2Backend;
    use crate::backends::module::ModBackend;
    use crate::matrix::Matrix;
    use crate::ring::ResidueRing;

    fn periodic(b: &ModBackend<ResidueRing>, len: usize) -> ChainComplex<ModBackend<ResidueRing>> {
        let x = b.free_module(1);
        let two = b.mor(&x, &x, Matrix::from_rows(1, &[vec![2]]));
        ChainComplex::new(vec![x; len + 1], vec![two; len])
    }

    #[test]
    fn periodic_complex_homology() {
        let b = ModBackend::new(ResidueRing::new(4).unwrap());
        let c = periodic(&b, 4);
        assert_eq!(c.validate(&b), Ok(()));
        for n in 0..4 {
            let h = homology(&b, &c, n).unwrap();
            assert!(check_certificate(&b, &c, &h));
            let expected = if n == 0 {
                vec!["2".to_string()]
            } else {
                vec![]
            };
            assert_eq!(
                b.fingerprint(&h.homology),
                crate::category::Fingerprint::Module {
                    invariant_factors: expected
                }
            );
        }
        assert!(matches!(
            homology(&b, &c, 4),
            Err(Error::DegreeOutOfRange { .. })
        ));
        assert!(properness_and_exactness(&b, &c)
            .iter()
            .skip(1)
            .all(|f| f.exact && f.proper));
    }

    #[test]
    fn corrupted_differential_flagged() {
        let b = ModBackend::new(ResidueRing::new(4).unwrap());
        let x = b.free_module(1);
        let two = b.mor(&x, &x, Matrix::from_rows(1, &[vec![2]]));
        let one = b.identity(&x);
        let c = ChainComplex::new(
            vec![x.clone(), x.clone(), x.clone(), x],
            vec![two.clone(), one, two],
        );
        assert_eq!(c.validate(&b), Err(1));
    }

    #[test]
    fn lie_complex_homology() {
        let b = Lie2Backend::new(ResidueRing::prime_field(3).unwrap()).unwrap();
        let f1 = b.free_object(1);
        let f2 = b.free_object(2);
        let d1 = b
            .morphism(&f1, &f2, Matrix::from_rows(1, &[vec![0], vec![0], vec![1]]))
            .unwrap();
        let c = ChainComplex::new(
            vec![f2, f1.clone(), b.zero_object()],
            vec![d1, b.zero_morphism(&b.zero_object(), &f1)],
        );
        let h0 = homology(&b, &c, 0).unwrap();
        assert_eq!(b.fingerprint(&h0.homology), b.fingerprint(&b.abelian(2)));
        let h1 = homology(&b, &c, 1).unwrap();
        assert!(h1.is_zero(&b));
    }
}

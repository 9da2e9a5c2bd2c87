//! Endomorphisms of `F_r` given by generator images.
//!
//! Conventions used throughout the crate:
//! - `compose(a, b)` is the map `w -> b(a(w))`: `a` is applied first.
//! - `inner(g)` is `w -> g w g^-1`.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::words::{GroupContext, Letter, Word};

#[derive(Clone, Debug)]
pub struct Endomorphism {
    ctx: GroupContext,
    /// Image of every letter, indexed by letter code, so inverses are cached.
    letter_images: Vec<Word>,
    label: Option<String>,
}

impl PartialEq for Endomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.letter_images == other.letter_images
    }
}

impl Eq for Endomorphism {}

impl Endomorphism {
    /// Map sending generator `i` to `images[i]`.
    pub fn new(ctx: GroupContext, images: Vec<Word>) -> Result<Endomorphism> {
        if images.len() != ctx.rank() {
            return Err(Error::RankMismatch { left: ctx.rank(), right: images.len() });
        }
        let mut letter_images = Vec::with_capacity(2 * images.len());
        for img in images {
            let inv = img.inverse();
            letter_images.push(img);
            letter_images.push(inv);
        }
        Ok(Endomorphism { ctx, letter_images, label: None })
    }

    /// Parse images from text, one word per generator.
    pub fn parse(ctx: &GroupContext, images: &[&str]) -> Result<Endomorphism> {
        let words = images.iter().map(|s| ctx.parse_word(s)).collect::<Result<Vec<_>>>()?;
        Endomorphism::new(ctx.clone(), words)
    }

    pub fn identity(ctx: &GroupContext) -> Endomorphism {
        let images = (0..ctx.rank()).map(|i| ctx.generator(i)).collect();
        Endomorphism::new(ctx.clone(), images).unwrap()
    }

    /// Power map `x_i -> x_i^k`.
    pub fn power_map(ctx: &GroupContext, k: usize) -> Endomorphism {
        let images = (0..ctx.rank()).map(|i| ctx.generator(i).pow(k)).collect();
        Endomorphism::new(ctx.clone(), images).unwrap().with_label(format!("power map k={k}"))
    }

    /// Map induced by a permutation of `X ∪ X^-1`, given by the images of the
    /// generators. Fails unless the images hit every generator index once.
    pub fn permutation(ctx: &GroupContext, generator_images: &[Letter]) -> Result<Endomorphism> {
        let mut seen = vec![false; ctx.rank()];
        if generator_images.len() != ctx.rank() {
            return Err(Error::RankMismatch { left: ctx.rank(), right: generator_images.len() });
        }
        for l in generator_images {
            if l.index() >= ctx.rank() || std::mem::replace(&mut seen[l.index()], true) {
                return Err(Error::Parse(format!("{generator_images:?} is not a permutation of the letters")));
            }
        }
        Endomorphism::new(ctx.clone(), generator_images.iter().map(|&l| Word::from(l)).collect())
    }

    /// Conjugation `w -> g w g^-1`.
    pub fn inner(ctx: &GroupContext, g: &Word) -> Endomorphism {
        let g_inv = g.inverse();
        let images = (0..ctx.rank()).map(|i| g.concat(&ctx.generator(i)).concat(&g_inv)).collect();
        Endomorphism::new(ctx.clone(), images).unwrap()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Endomorphism {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.ctx.rank()
    }

    pub fn image(&self, generator: usize) -> &Word {
        &self.letter_images[2 * generator]
    }

    pub fn images(&self) -> impl Iterator<Item = &Word> {
        self.letter_images.iter().step_by(2)
    }

    pub fn letter_image(&self, l: Letter) -> &Word {
        &self.letter_images[l.code()]
    }

    /// `max_i |φ(x_i)|`.
    pub fn max_image_len(&self) -> usize {
        self.images().map(Word::len).max().unwrap_or(0)
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::identity();
        for &l in w.letters() {
            out.append(self.letter_image(l));
        }
        out
    }

    /// `|φ(w)|` without keeping the image around.
    pub fn image_len(&self, w: &Word) -> usize {
        self.apply(w).len()
    }

    /// Is every generator fixed?
    pub fn is_identity(&self) -> bool {
        self.images().enumerate().all(|(i, img)| img.letters() == [Letter::new(i, false)])
    }

    pub fn format_images(&self) -> String {
        (0..self.rank())
            .map(|i| format!("{}: {}", self.ctx.names()[i], self.ctx.format_word(self.image(i))))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(label) => write!(f, "{label} [{}]", self.format_images()),
            None => write!(f, "[{}]", self.format_images()),
        }
    }
}

/// `w -> beta(alpha(w))`.
pub fn compose(alpha: &Endomorphism, beta: &Endomorphism) -> Result<Endomorphism> {
    if alpha.rank() != beta.rank() {
        return Err(Error::RankMismatch { left: alpha.rank(), right: beta.rank() });
    }
    let images = alpha.images().map(|img| beta.apply(img)).collect();
    Endomorphism::new(alpha.ctx.clone(), images)
}

pub fn power(phi: &Endomorphism, n: usize) -> Endomorphism {
    let mut out = Endomorphism::identity(&phi.ctx);
    for _ in 0..n {
        out = compose(&out, phi).unwrap();
    }
    out
}

/// An endomorphism paired with a checked two-sided inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifiedAutomorphism {
    forward: Endomorphism,
    inverse: Endomorphism,
}

impl VerifiedAutomorphism {
    pub fn forward(&self) -> &Endomorphism {
        &self.forward
    }

    pub fn inverse(&self) -> &Endomorphism {
        &self.inverse
    }

    pub fn inverted(&self) -> VerifiedAutomorphism {
        VerifiedAutomorphism { forward: self.inverse.clone(), inverse: self.forward.clone() }
    }

    pub fn identity(ctx: &GroupContext) -> VerifiedAutomorphism {
        let id = Endomorphism::identity(ctx);
        VerifiedAutomorphism { forward: id.clone(), inverse: id }
    }

    /// `self` applied first, then `other`.
    pub fn then(&self, other: &VerifiedAutomorphism) -> Result<VerifiedAutomorphism> {
        Ok(VerifiedAutomorphism {
            forward: compose(&self.forward, &other.forward)?,
            inverse: compose(&other.inverse, &self.inverse)?,
        })
    }
}

/// Succeeds iff `psi ∘ phi` and `phi ∘ psi` both fix every generator.
pub fn verify_inverse(phi: &Endomorphism, psi: &Endomorphism) -> Result<VerifiedAutomorphism> {
    let ctx = phi.ctx();
    for (first, second) in [(phi, psi), (psi, phi)] {
        let both = compose(first, second)?;
        for i in 0..ctx.rank() {
            if both.image(i).letters() != [Letter::new(i, false)] {
                return Err(Error::NotInverse { generator: ctx.names()[i].to_string(), image: ctx.format_word(both.image(i)) });
            }
        }
    }
    Ok(VerifiedAutomorphism { forward: phi.clone(), inverse: psi.clone() })
}

/// Elementary Nielsen moves; each has an explicit inverse move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NielsenMove {
    /// `x_i -> x_i^-1`.
    Invert(usize),
    /// `x_i <-> x_j`.
    Swap(usize, usize),
    /// `x_i -> x_i l` with `l` a letter of another generator.
    MultiplyRight(usize, Letter),
    /// `x_i -> l x_i`.
    MultiplyLeft(usize, Letter),
}

impl NielsenMove {
    pub fn to_endomorphism(self, ctx: &GroupContext) -> Endomorphism {
        let mut images: Vec<Word> = (0..ctx.rank()).map(|i| ctx.generator(i)).collect();
        match self {
            NielsenMove::Invert(i) => images[i] = images[i].inverse(),
            NielsenMove::Swap(i, j) => images.swap(i, j),
            NielsenMove::MultiplyRight(i, l) => images[i] = images[i].concat(&Word::from(l)),
            NielsenMove::MultiplyLeft(i, l) => images[i] = Word::from(l).concat(&images[i]),
        }
        Endomorphism::new(ctx.clone(), images).unwrap()
    }

    pub fn inverse(self) -> NielsenMove {
        match self {
            NielsenMove::Invert(_) | NielsenMove::Swap(..) => self,
            NielsenMove::MultiplyRight(i, l) => NielsenMove::MultiplyRight(i, l.inverse()),
            NielsenMove::MultiplyLeft(i, l) => NielsenMove::MultiplyLeft(i, l.inverse()),
        }
    }

    pub fn random<R: Rng + ?Sized>(ctx: &GroupContext, rng: &mut R) -> NielsenMove {
        let r = ctx.rank();
        if r == 1 {
            return NielsenMove::Invert(0);
        }
        let i = rng.random_range(0..r);
        let mut j = rng.random_range(0..r - 1);
        if j >= i {
            j += 1;
        }
        let l = Letter::new(j, rng.random_bool(0.5));
        match rng.random_range(0..6) {
            0 => NielsenMove::Invert(i),
            1 => NielsenMove::Swap(i, j),
            2 | 3 => NielsenMove::MultiplyRight(i, l),
            _ => NielsenMove::MultiplyLeft(i, l),
        }
    }
}

/// Product of Nielsen moves, first move applied first, with its inverse.
pub fn nielsen_product(ctx: &GroupContext, moves: &[NielsenMove]) -> VerifiedAutomorphism {
    let mut acc = VerifiedAutomorphism::identity(ctx);
    for m in moves {
        let step = VerifiedAutomorphism { forward: m.to_endomorphism(ctx), inverse: m.inverse().to_endomorphism(ctx) };
        acc = acc.then(&step).unwrap();
    }
    acc
}

/// Automorphism built from `1..=max_moves` random Nielsen moves.
pub fn random_automorphism<R: Rng + ?Sized>(ctx: &GroupContext, max_moves: usize, rng: &mut R) -> VerifiedAutomorphism {
    let count = rng.random_range(1..=max_moves.max(1));
    let moves: Vec<NielsenMove> = (0..count).map(|_| NielsenMove::random(ctx, rng)).collect();
    nielsen_product(ctx, &moves)
}

/// Endomorphism with random reduced images of length `0..=max_len`.
pub fn random_endomorphism<R: Rng + ?Sized>(ctx: &GroupContext, max_len: usize, rng: &mut R) -> Endomorphism {
    let images = (0..ctx.rank())
        .map(|_| {
            let len = rng.random_range(0..=max_len);
            let mut w = Word::identity();
            while w.len() < len {
                let l = Letter::from_code(rng.random_range(0..ctx.alphabet_size()));
                if w.last() != Some(l.inverse()) {
                    w.push(l);
                }
            }
            w
        })
        .collect();
    Endomorphism::new(ctx.clone(), images).unwrap()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Permutation of `X ∪ X^-1`; the letters are the generator images.
    Permutation(Vec<Letter>),
    /// Conjugation by a nontrivial element.
    Inner(Word),
    /// `w -> g π(w) g^-1` with both parts nontrivial.
    Simple {
        conjugator: Word,
        permutation: Vec<Letter>,
    },
    /// `x_i -> x_i^k` for a common `k >= 2`.
    PowerMap(usize),
    General,
}

impl Classification {
    pub fn is_simple(&self) -> bool {
        matches!(self, Classification::Permutation(_) | Classification::Inner(_) | Classification::Simple { .. })
    }

    pub fn describe(&self, ctx: &GroupContext) -> String {
        let perm = |p: &[Letter]| {
            p.iter()
                .enumerate()
                .map(|(i, &l)| format!("{}->{}", ctx.names()[i], ctx.letter_char(l)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        match self {
            Classification::Permutation(p) => format!("permutation ({})", perm(p)),
            Classification::Inner(g) => format!("inner (g = {})", ctx.format_word(g)),
            Classification::Simple { conjugator, permutation } => {
                format!("simple (g = {}, permutation {})", ctx.format_word(conjugator), perm(permutation))
            }
            Classification::PowerMap(k) => format!("power map (k = {k})"),
            Classification::General => "general".to_string(),
        }
    }
}

/// Decide whether `φ(x_i) = g π(x_i) g^-1` for some `g` and letter
/// permutation `π`, and otherwise whether `φ` is a power map.
///
/// The conjugator is searched among prefixes of the images. When `g` is taken
/// without cancellation against `π(x_i)`, the resulting image has length
/// `2|g| + 1` and starts with `g`, so prefixes of images suffice.
pub fn classify(phi: &Endomorphism) -> Classification {
    if let Some((g, perm)) = find_simple_decomposition(phi) {
        let trivial_perm = perm.iter().enumerate().all(|(i, l)| *l == Letter::new(i, false));
        return match (g.is_identity(), trivial_perm) {
            (true, _) => Classification::Permutation(perm),
            (false, true) => Classification::Inner(g),
            (false, false) => Classification::Simple { conjugator: g, permutation: perm },
        };
    }
    if let Some(k) = power_exponent(phi) {
        return Classification::PowerMap(k);
    }
    Classification::General
}

fn find_simple_decomposition(phi: &Endomorphism) -> Option<(Word, Vec<Letter>)> {
    let mut candidates: Vec<Word> = Vec::new();
    for img in phi.images() {
        for k in 0..=img.len() / 2 {
            let g = img.prefix(k);
            if !candidates.contains(&g) {
                candidates.push(g);
            }
        }
    }
    candidates.sort_by_key(Word::len);
    'candidate: for g in candidates {
        let g_inv = g.inverse();
        let mut perm = Vec::with_capacity(phi.rank());
        let mut seen = vec![false; phi.rank()];
        for img in phi.images() {
            let core = g_inv.concat(img).concat(&g);
            if core.len() != 1 {
                continue 'candidate;
            }
            let l = core.letters()[0];
            if std::mem::replace(&mut seen[l.index()], true) {
                continue 'candidate;
            }
            perm.push(l);
        }
        return Some((g, perm));
    }
    None
}

fn power_exponent(phi: &Endomorphism) -> Option<usize> {
    let k = phi.image(0).len();
    if k < 2 {
        return None;
    }
    let ctx = phi.ctx();
    (0..phi.rank()).all(|i| *phi.image(i) == ctx.generator(i).pow(k)).then_some(k)
}

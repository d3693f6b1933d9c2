use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rankpres", version, about = "Rank-k projection preservers: geometry, generators and classification")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every randomized step; always echoed in the output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Pretty,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Principal angles between two subspaces, ascending.
    Angles(PairArgs),
    /// Gap ‖P_X − P_Y‖ between two subspaces.
    Gap(PairArgs),
    /// Joint canonical form of the two projections.
    Canon {
        #[command(flatten)]
        pair: PairArgs,
        /// Angle below which principal angles are merged.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Subspaces Z with a(P_X + P_Y) + (1 − 2a)P_Z a projection.
    #[command(subcommand)]
    Hol(HolCommand),
    /// Generators of example maps.
    #[command(subcommand)]
    Construct(ConstructCommand),
    /// Canonical-form recovery.
    #[command(subcommand)]
    Classify(ClassifyCommand),
    /// Randomized check that a map sends rank-k projections to projections of one rank.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Coordinates in the canonical hermitian basis.
    #[command(subcommand)]
    Basis(BasisCommand),
    /// Seeded invariant suite.
    Selftest {
        /// Corrupt kernel outputs to check that failures are reported.
        #[arg(long)]
        inject_fault: bool,
    },
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
}

#[derive(Debug, Args)]
pub struct HolArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long)]
    pub a: f64,
}

#[derive(Debug, Subcommand)]
pub enum HolCommand {
    /// Whether the set is nonempty.
    Exists {
        #[command(flatten)]
        hol: HolArgs,
        /// Slack added to the gap bound.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Whether a given Z belongs to the set.
    Member {
        #[command(flatten)]
        hol: HolArgs,
        #[arg(long)]
        z: PathBuf,
        /// Largest accepted projection defect of the combination.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// One element of the set.
    Sample {
        #[command(flatten)]
        hol: HolArgs,
        /// Draw the free parameters at random instead of the canonical choice.
        #[arg(long)]
        random: bool,
    },
    /// Block parameters t_j of the members.
    Tvalues {
        #[command(flatten)]
        hol: HolArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConstructCommand {
    /// A ↦ (tr A / k) I_m − A.
    Lk {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
    },
    /// ρ_k: C^k → M_{2^{k−1}}.
    Rho {
        #[arg(long)]
        k: usize,
    },
    /// A ↦ U A U* (or U Ā U*).
    Congruence {
        /// Isometry U as a matrix file.
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        conj: bool,
    },
    /// A ↦ A ⊗ P_0 on H_n.
    Tensor {
        #[arg(long)]
        p0: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// A ↦ A ⊗ P_0 + ((tr A / k) I − A) ⊗ Q_0.
    Pq {
        #[arg(long)]
        p0: PathBuf,
        #[arg(long)]
        q0: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// A ↦ (tr A / k) P_0.
    Constant {
        #[arg(long)]
        p0: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Off-diagonal embedding H_{2k} → H_{2m} through an admissible τ.
    E2km {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: f64,
        /// τ as a real-linear map file; defaults to the rotation map at --phi.
        #[arg(long)]
        tau: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
    },
    /// H_n → H_{2^{n−1}} built from ρ_{n−1}.
    Hn2big {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// A ↦ ρ_m(A v_0).
    VectorEval {
        /// Unit vector as an m × 1 matrix file.
        #[arg(long)]
        v0: PathBuf,
        #[arg(long, value_enum, default_value_t = EvalDomain::Mat)]
        domain: EvalDomain,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalDomain {
    Herm,
    Traceless,
    Mat,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Extra bound on the reported residual; stricter values can only reject.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum ClassifyCommand {
    /// Linear maps of H^0_{2k} preserving involutions.
    Iho(ClassifyArgs),
    /// Real-linear maps H^0_2 → M_m sending involutions to unitaries.
    H0u(ClassifyArgs),
    /// Linear maps H^0_2 → H_m sending involutions to hermitian unitaries.
    C2m(ClassifyArgs),
    /// Rank-one projection preservers on H_2.
    Dim2(ClassifyArgs),
    /// Rank-k to rank-m projection preservers.
    Phkk {
        #[command(flatten)]
        args: ClassifyArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum BasisCommand {
    /// Hermitian matrix file → coordinates.
    Encode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        traceless: bool,
    },
    /// Coordinates file → hermitian matrix.
    Decode {
        #[arg(long)]
        input: PathBuf,
    },
}

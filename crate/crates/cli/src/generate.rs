//! `generate`: model graphs and radial profiles.

use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, ValueEnum};
use heatgraph::radial::{build_profile, realize_graph, GeneratorSpec, ParamSeq};
use heatgraph::Error;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Tree,
    Antitree,
    Birthdeath,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub family: FamilyArg,
    /// Outer degree of a tree (expression in r or a comma list).
    #[arg(long)]
    pub degplus: Option<String>,
    /// Sphere sizes of an anti-tree.
    #[arg(long)]
    pub a: Option<String>,
    /// Edge weights b(r, r+1) of a birth-death chain.
    #[arg(long)]
    pub b: Option<String>,
    /// Vertex measure of a birth-death chain.
    #[arg(long, default_value = "1")]
    pub m: String,
    #[arg(long = "R")]
    pub radius: usize,
    #[arg(long, short, default_value = ".")]
    pub out: PathBuf,
    /// Write only the profile.
    #[arg(long)]
    pub profile_only: bool,
    /// Also write the graph of a birth-death chain.
    #[arg(long)]
    pub graph: bool,
}

fn required(value: &Option<String>, flag: &str, family: &str) -> anyhow::Result<ParamSeq> {
    let text = value
        .as_deref()
        .ok_or_else(|| Error::Precondition(format!("{family} needs --{flag}")))?;
    Ok(ParamSeq::parse(text)?)
}

pub fn run(args: &GenerateArgs) -> anyhow::Result<()> {
    let (spec, stem, want_graph) = match args.family {
        FamilyArg::Tree => (
            GeneratorSpec::tree(required(&args.degplus, "degplus", "tree")?, args.radius),
            "tree",
            !args.profile_only,
        ),
        FamilyArg::Antitree => (
            GeneratorSpec::antitree(required(&args.a, "a", "antitree")?, args.radius),
            "antitree",
            !args.profile_only,
        ),
        FamilyArg::Birthdeath => (
            GeneratorSpec::birth_death(
                required(&args.b, "b", "birthdeath")?,
                ParamSeq::parse(&args.m)?,
                args.radius,
            ),
            "birthdeath",
            args.graph,
        ),
    };
    let profile = build_profile(&spec)?;
    if !profile.has_finite_masses() {
        return Err(Error::Precondition(format!(
            "sphere masses overflow before radius {}; choose a smaller --R",
            args.radius
        ))
        .into());
    }
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let header = format!("# {} {} R={}\n", spec.family.name(), spec.primary.describe(), args.radius);
    let profile_path = args.out.join(format!("{stem}.profile"));
    fs::write(&profile_path, format!("{header}{}", profile.to_text()))
        .with_context(|| format!("writing {}", profile_path.display()))?;
    println!("wrote {}", profile_path.display());
    if want_graph {
        let real = realize_graph(&spec, args.radius)?;
        let graph_path = args.out.join(format!("{stem}.graph"));
        let text = format!(
            "{header}# root {}\n# radius {}\n{}",
            real.graph.name(real.root),
            real.radius,
            real.graph.to_text()
        );
        fs::write(&graph_path, text).with_context(|| format!("writing {}", graph_path.display()))?;
        println!(
            "wrote {} ({} vertices, {} edges)",
            graph_path.display(),
            real.graph.len(),
            real.graph.edge_count()
        );
    }
    Ok(())
}

//! Plumbing for the `cholinv` binary: the matrix text format, atomic output
//! files, and the subcommand implementations.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use cholinv_core::opcount::COUNTS_HEADER;
use cholinv_core::{
    cholesky_upper, count_table, counts_csv, invert, invert_nonhermitian, ldl_upper, run_sweep,
    CountsRow, Flavor, InverseMethod, OpCountTarget, OpCounter, SweepConfig,
};

pub mod matrix_file;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: line {line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Core(#[from] cholinv_core::Error),
}

impl CliError {
    /// Process exit status for this error.
    ///
    /// * 1: I/O failure
    /// * 2: malformed input or bad arguments
    /// * 3: not positive definite, zero pivot, or singular
    /// * 4: not Hermitian
    pub fn exit_code(&self) -> i32 {
        use cholinv_core::Error as E;
        match self {
            CliError::Io { .. } => 1,
            CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                E::NotPositiveDefinite { .. }
                | E::ZeroPivot { .. }
                | E::SingularDiagonal { .. }
                | E::Singular => 3,
                E::NotHermitian { .. } => 4,
                E::NotSquare { .. }
                | E::DimensionMismatch { .. }
                | E::InvalidFormat(_)
                | E::InvalidConfig(_) => 2,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes every `(path, contents)` pair through a temporary file in the
/// target directory. Nothing is renamed into place until all temporaries
/// have been written.
pub fn write_atomic(files: &[(&Path, &str)]) -> CliResult<()> {
    let mut staged = Vec::with_capacity(files.len());
    for &(path, contents) in files {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
        tmp.write_all(contents.as_bytes()).map_err(io_err(path))?;
        tmp.as_file().sync_all().map_err(io_err(path))?;
        staged.push((path, tmp));
    }
    for (path, tmp) in staged {
        tmp.persist(path).map_err(|e| io_err(path)(e.error))?;
    }
    Ok(())
}

/// Writes to `path`, or to standard output when `path` is `None`.
fn emit(path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => write_atomic(&[(p, contents)]),
        None => io::stdout()
            .write_all(contents.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

fn ldl_pivots_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".d");
    PathBuf::from(s)
}

pub fn cmd_decompose(input: &Path, flavor: Flavor, output: &Path) -> CliResult<()> {
    let a = matrix_file::read(input)?;
    match flavor {
        Flavor::Chol => {
            let f = cholesky_upper(&a, None)?;
            write_atomic(&[(output, &matrix_file::format(&f.r))])
        }
        Flavor::Ldl => {
            let f = ldl_upper(&a, None)?;
            let d_path = ldl_pivots_path(output);
            let d_text = matrix_file::format_reals(&f.d_real());
            write_atomic(&[(output, &matrix_file::format(&f.r)), (&d_path, &d_text)])
        }
    }
}

/// Inverts the matrix in `input`. Returns the counts CSV (header and one
/// row) when `count_ops` is set.
pub fn cmd_invert(
    input: &Path,
    method: InverseMethod,
    nonhermitian: bool,
    count_ops: bool,
    output: &Path,
) -> CliResult<Option<String>> {
    let a = matrix_file::read(input)?;
    let mut counter = OpCounter::new();
    let counter_ref = count_ops.then_some(&mut counter);
    let x = if nonhermitian {
        invert_nonhermitian(&a, method, counter_ref)?
    } else {
        invert(&a, method, counter_ref)?
    };
    write_atomic(&[(output, &matrix_file::format(&x))])?;
    Ok(count_ops.then(|| {
        let row = CountsRow {
            target: OpCountTarget::Invert(method),
            n: a.rows(),
            counts: counter,
            fitted_c: None,
        };
        format!("{COUNTS_HEADER}\n{}\n", row.to_csv_line())
    }))
}

pub fn cmd_opcount(
    targets: &[OpCountTarget],
    sizes: &[usize],
    output: Option<&Path>,
) -> CliResult<()> {
    if targets.is_empty() || sizes.is_empty() {
        return Err(CliError::Usage(
            "need at least one method and one size".into(),
        ));
    }
    if let Some(n) = sizes.iter().find(|&&n| n < 2) {
        return Err(CliError::Usage(format!(
            "sizes must be at least 2, got {n}"
        )));
    }
    let rows = count_table(targets, sizes, 0)?;
    emit(output, &counts_csv(&rows))
}

pub fn cmd_fxperr(config: &SweepConfig, output: Option<&Path>) -> CliResult<()> {
    if config.sizes.is_empty() || config.methods.is_empty() || config.formats.is_empty() {
        return Err(CliError::Usage(
            "need at least one size, method and Q format".into(),
        ));
    }
    let report = run_sweep(config)?;
    emit(output, &report.to_csv())
}

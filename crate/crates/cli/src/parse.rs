use pluripot_core::geometry::{parse_complex, DomainSpec, APPENDIX_TERMS};
use pluripot_core::C64;

use crate::io::{usage, CliResult, Ctx};

pub fn complex(s: &str) -> CliResult<C64> {
    Ok(parse_complex(s)?)
}

/// `"z,w"` with each side in any form accepted by [`complex`].
pub fn complex_pair(s: &str) -> CliResult<(C64, C64)> {
    let (a, b) = s.split_once(',').ok_or_else(|| usage(format!("expected z,w, got '{s}'")))?;
    Ok((complex(a)?, complex(b)?))
}

pub fn reals(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("bad number '{t}' in list '{s}'"))))
        .collect()
}

/// `disk`, `annulus:r`, `appendix`, or a JSON domain (inline or file).
pub fn domain(ctx: &Ctx, s: &str) -> CliResult<DomainSpec> {
    let spec = match s {
        "disk" => DomainSpec::unit_disk(),
        "appendix" => DomainSpec::appendix_domain(APPENDIX_TERMS),
        _ => match s.strip_prefix("annulus:") {
            Some(r) => DomainSpec::annulus(r.parse().map_err(|_| usage(format!("bad annulus radius '{r}'")))?, 1.0),
            None => ctx.load_json("domain", s)?,
        },
    };
    spec.validate()?;
    Ok(spec)
}

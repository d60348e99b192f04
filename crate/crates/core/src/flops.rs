//! Flop-count model for GFDM transmitters and receivers.
//!
//! One flop is a real multiply or add. Complex multiply and divide cost 6,
//! complex add and conjugate 2, modulus squared 3. FFTs up to 16 points use
//! the Winograd counts; larger ones use split radix.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{GfdmError, Result};

/// Winograd small-FFT flop counts for sizes 2, 4, 8, 16.
pub const WINOGRAD_FLOPS: [(u64, u64); 4] = [(2, 4), (4, 12), (8, 34), (16, 92)];

/// Largest size for which Winograd counts are used.
pub const WINOGRAD_MAX: u64 = 16;

/// Flops of an `size`-point FFT. `size` must be a power of two.
pub fn fft_flops(size: u64) -> Result<u64> {
    if size == 0 || !size.is_power_of_two() {
        return Err(GfdmError::param(format!("FFT size {size} is not a power of two")));
    }
    if size == 1 {
        return Ok(0);
    }
    if size <= WINOGRAD_MAX {
        return Ok(WINOGRAD_FLOPS.iter().find(|(s, _)| *s == size).map(|(_, f)| *f).unwrap());
    }
    let log = size.trailing_zeros() as u64;
    Ok(4 * size * log - 6 * size + 8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    ProposedTx,
    MichailowTx,
    FarhangTx,
    LinTx,
    OfdmTx,
    ProposedZfMfRx,
    ProposedBiasedMmseRx,
    ProposedUnbiasedMmseRx,
    FarhangZfMfRx,
    FarhangMmseRx,
    MichailowZfMfRx,
    SicRx,
    OfdmRx,
}

impl Scheme {
    pub const ALL: [Scheme; 13] = [
        Scheme::ProposedTx,
        Scheme::MichailowTx,
        Scheme::FarhangTx,
        Scheme::LinTx,
        Scheme::OfdmTx,
        Scheme::ProposedZfMfRx,
        Scheme::ProposedBiasedMmseRx,
        Scheme::ProposedUnbiasedMmseRx,
        Scheme::FarhangZfMfRx,
        Scheme::FarhangMmseRx,
        Scheme::MichailowZfMfRx,
        Scheme::SicRx,
        Scheme::OfdmRx,
    ];

    pub fn is_transmitter(self) -> bool {
        matches!(
            self,
            Scheme::ProposedTx | Scheme::MichailowTx | Scheme::FarhangTx | Scheme::LinTx | Scheme::OfdmTx
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::ProposedTx => "PROPOSED_TX",
            Scheme::MichailowTx => "MICHAILOW_TX",
            Scheme::FarhangTx => "FARHANG_TX",
            Scheme::LinTx => "LIN_TX",
            Scheme::OfdmTx => "OFDM_TX",
            Scheme::ProposedZfMfRx => "PROPOSED_ZF_MF_RX",
            Scheme::ProposedBiasedMmseRx => "PROPOSED_BIASED_MMSE_RX",
            Scheme::ProposedUnbiasedMmseRx => "PROPOSED_UNBIASED_MMSE_RX",
            Scheme::FarhangZfMfRx => "FARHANG_ZF_MF_RX",
            Scheme::FarhangMmseRx => "FARHANG_MMSE_RX",
            Scheme::MichailowZfMfRx => "MICHAILOW_ZF_MF_RX",
            Scheme::SicRx => "SIC_RX",
            Scheme::OfdmRx => "OFDM_RX",
        }
    }

    /// The OFDM row a scheme is compared against.
    pub fn ofdm_reference(self) -> Scheme {
        if self.is_transmitter() {
            Scheme::OfdmTx
        } else {
            Scheme::OfdmRx
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = GfdmError;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase().replace('-', "_");
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == up)
            .ok_or_else(|| GfdmError::Parse(format!("unknown scheme '{s}'")))
    }
}

/// Receiver channel setting. Transmitter rows take no channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelCase {
    Awgn,
    FadingZfFde,
    FadingMmseFde,
}

impl ChannelCase {
    pub const ALL: [ChannelCase; 3] = [ChannelCase::Awgn, ChannelCase::FadingZfFde, ChannelCase::FadingMmseFde];

    pub fn name(self) -> &'static str {
        match self {
            ChannelCase::Awgn => "AWGN",
            ChannelCase::FadingZfFde => "FADING_ZF_FDE",
            ChannelCase::FadingMmseFde => "FADING_MMSE_FDE",
        }
    }
}

impl fmt::Display for ChannelCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelCase {
    type Err = GfdmError;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase().replace('-', "_");
        ChannelCase::ALL
            .into_iter()
            .find(|c| c.name() == up)
            .ok_or_else(|| GfdmError::Parse(format!("unknown channel case '{s}'")))
    }
}

fn channel_label(channel: Option<ChannelCase>) -> &'static str {
    channel.map_or("TX", ChannelCase::name)
}

/// Filter support `l` (defaults to N) and SIC iteration count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlopExtras {
    pub l: Option<u64>,
    pub iterations: u64,
}

impl Default for FlopExtras {
    fn default() -> Self {
        FlopExtras { l: None, iterations: 8 }
    }
}

impl FlopExtras {
    pub fn l_for(&self, n: u64) -> u64 {
        self.l.unwrap_or(n)
    }
}

/// Closed-form flop count of one scheme. Proposed receivers count M N-point
/// FFTs (the pipeline's actual inventory).
pub fn scheme_flops(scheme: Scheme, channel: Option<ChannelCase>, m: u64, n: u64, extras: &FlopExtras) -> Result<u64> {
    if m == 0 || n == 0 {
        return Err(GfdmError::param("M and N must be positive"));
    }
    let (cm, cn, cmn) = (fft_flops(m)?, fft_flops(n)?, fft_flops(m * n)?);
    let mn = m * n;
    let l = extras.l_for(n);
    if l == 0 || l > n {
        return Err(GfdmError::param(format!("filter support L={l} outside [1, N={n}]")));
    }
    let i = extras.iterations;
    let sic_core = 2 * n * cm + 6 * l * mn + i * (4 * n * cm + 6 * mn);
    let proposed_core = m * cn + 2 * n * cm;

    if scheme.is_transmitter() {
        if channel.is_some() {
            return Err(GfdmError::Unsupported(format!("{scheme} takes no channel case")));
        }
        return Ok(match scheme {
            Scheme::ProposedTx => proposed_core + 6 * mn,
            Scheme::MichailowTx => m * cn + 2 * n * cm + 6 * mn * l,
            Scheme::FarhangTx => m * cn + 4 * m * m * n,
            Scheme::LinTx => m * cn + 3 * m * m * n + 2 * (m - 1) * n,
            Scheme::OfdmTx => m * cn,
            _ => unreachable!(),
        });
    }

    let channel = channel.ok_or_else(|| GfdmError::Unsupported(format!("{scheme} needs a channel case")))?;
    let flops = match channel {
        ChannelCase::Awgn => match scheme {
            Scheme::OfdmRx => m * cn,
            Scheme::FarhangZfMfRx => m * cn + 3 * m * m * n + 2 * (m - 1) * n,
            Scheme::MichailowZfMfRx => 2 * cmn + 2 * n * cm + 6 * mn * l,
            Scheme::FarhangMmseRx => m * cn + 12 * m * m * n + 9 * mn,
            Scheme::SicRx => 2 * cmn + sic_core,
            Scheme::ProposedZfMfRx => proposed_core + 6 * mn,
            Scheme::ProposedBiasedMmseRx => proposed_core + 11 * mn,
            Scheme::ProposedUnbiasedMmseRx => proposed_core + 17 * mn,
            _ => unreachable!(),
        },
        ChannelCase::FadingZfFde | ChannelCase::FadingMmseFde => {
            // FDE: one MN-point FFT/IFFT pair and one multiply, plus 7MN to
            // form the MMSE coefficients.
            let fde = if channel == ChannelCase::FadingZfFde { 6 * mn } else { 13 * mn };
            match scheme {
                Scheme::OfdmRx => m * cn + fde,
                Scheme::FarhangZfMfRx => 2 * cmn + m * cn + 3 * m * m * n + 2 * mn + fde - 2 * n,
                Scheme::MichailowZfMfRx | Scheme::SicRx => 4 * cmn + sic_core + fde,
                Scheme::FarhangMmseRx => 2 * cmn + m * cn + 12 * m * m * n + 9 * mn + fde,
                Scheme::ProposedZfMfRx => 2 * cmn + proposed_core + 6 * mn + fde,
                Scheme::ProposedBiasedMmseRx => 2 * cmn + proposed_core + 11 * mn + fde,
                Scheme::ProposedUnbiasedMmseRx => 2 * cmn + proposed_core + 17 * mn + fde,
                _ => unreachable!(),
            }
        }
    };
    Ok(flops)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlopRow {
    pub scheme: Scheme,
    pub channel: Option<ChannelCase>,
    pub m: u64,
    pub n: u64,
    pub l: u64,
    pub iterations: u64,
    pub flops: u64,
    pub ratio_to_ofdm: f64,
}

/// One row per (scheme, M, N), scheme-major, then M, then N.
pub fn complexity_report(
    m_range: &[u64],
    n_range: &[u64],
    schemes: &[(Scheme, Option<ChannelCase>)],
    extras: &FlopExtras,
) -> Result<Vec<FlopRow>> {
    let mut rows = Vec::with_capacity(schemes.len() * m_range.len() * n_range.len());
    for &(scheme, channel) in schemes {
        for &m in m_range {
            for &n in n_range {
                let flops = scheme_flops(scheme, channel, m, n, extras)?;
                let reference = scheme_flops(scheme.ofdm_reference(), channel, m, n, extras)?;
                rows.push(FlopRow {
                    scheme,
                    channel,
                    m,
                    n,
                    l: extras.l_for(n),
                    iterations: extras.iterations,
                    flops,
                    ratio_to_ofdm: if reference == 0 { f64::INFINITY } else { flops as f64 / reference as f64 },
                });
            }
        }
    }
    Ok(rows)
}

pub fn report_csv(rows: &[FlopRow]) -> String {
    let mut s = String::from("scheme,channel,M,N,L,I,flops\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.scheme,
            channel_label(r.channel),
            r.m,
            r.n,
            r.l,
            r.iterations,
            r.flops
        );
    }
    s
}

pub fn report_markdown(rows: &[FlopRow]) -> String {
    let mut s = String::from("| scheme | channel | M | N | L | I | flops | ratio to OFDM |\n");
    s.push_str("|---|---|---:|---:|---:|---:|---:|---:|\n");
    for r in rows {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} | {:.3} |",
            r.scheme,
            channel_label(r.channel),
            r.m,
            r.n,
            r.l,
            r.iterations,
            r.flops,
            r.ratio_to_ofdm
        );
    }
    s.push_str(
        "\nProposed receiver rows count M N-point FFTs, 2N M-point FFTs and the \
         diagonal work (M N-point, not M M-point, transforms in the first term).\n",
    );
    s
}

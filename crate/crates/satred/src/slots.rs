//! Day colours: red `t ≡ 0 (mod 3)`, blue `t ≡ 1 (mod 3)`, green `t ≡ 2 (mod 6)`,
//! purple `t ≡ 5 (mod 6)`.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SlotColor {
    Red,
    Blue,
    Green,
    Purple,
}

impl SlotColor {
    pub const ALL: [SlotColor; 4] = [SlotColor::Red, SlotColor::Blue, SlotColor::Green, SlotColor::Purple];

    pub fn of_day(t: u64) -> SlotColor {
        match t % 6 {
            0 | 3 => SlotColor::Red,
            1 | 4 => SlotColor::Blue,
            2 => SlotColor::Green,
            _ => SlotColor::Purple,
        }
    }

    pub fn letter(self) -> char {
        match self {
            SlotColor::Red => 'R',
            SlotColor::Blue => 'B',
            SlotColor::Green => 'G',
            SlotColor::Purple => 'P',
        }
    }
}

impl fmt::Display for SlotColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SlotColor::Red => "red",
            SlotColor::Blue => "blue",
            SlotColor::Green => "green",
            SlotColor::Purple => "purple",
        };
        f.write_str(name)
    }
}

impl FromStr for SlotColor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "red" | "R" => Ok(SlotColor::Red),
            "blue" | "B" => Ok(SlotColor::Blue),
            "green" | "G" => Ok(SlotColor::Green),
            "purple" | "P" => Ok(SlotColor::Purple),
            _ => Err(format!("unknown slot colour `{s}`")),
        }
    }
}

/// Colour shared by all days `t ≡ phase (mod freq)`, or `None` when they differ.
pub fn phase_color(phase: u64, freq: u64) -> Option<SlotColor> {
    // The days of the class repeat mod lcm(freq, 6); checking one lcm-period suffices.
    let span = freq * 6 / gcd(freq, 6);
    let first = SlotColor::of_day(phase);
    (phase..phase + span)
        .step_by(freq as usize)
        .all(|t| SlotColor::of_day(t) == first)
        .then_some(first)
}

/// Bitmask over `0..freq` of the phases whose days all have `color`.
pub fn color_mask(color: SlotColor, freq: u64) -> u16 {
    (0..freq)
        .filter(|&p| phase_color(p, freq) == Some(color))
        .fold(0, |m, p| m | 1 << p)
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Formats an observed edge colour; green/purple mixtures print as `mixed`.
pub fn describe(color: Option<SlotColor>) -> String {
    color.map_or_else(|| "mixed".to_string(), |c| c.to_string())
}

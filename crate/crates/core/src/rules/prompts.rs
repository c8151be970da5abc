//! Canonical prompt text per puzzle: the rule paragraph and the four query
//! templates (cell-at, direct solution, valid-action, chain-of-thought).
//!
//! These strings are frozen verbatim, including irregular spacing,
//! capitalization, and the "formate" typo in Kakurasu — downstream datasets
//! depend on byte-identical prompts. `{Rule}`, `{row}`, `{col}` and
//! `{value}` (or `{b, w}` in Binairo's valid-action) are the substitution
//! placeholders; everything else is literal.

#[derive(Debug)]
pub struct PromptSet {
    pub rule: &'static str,
    pub cell_at: &'static str,
    pub direct: &'static str,
    pub valid_action: &'static str,
    pub cot: &'static str,
}

pub const AQUARIUM: PromptSet = PromptSet {
    rule: "You are an Aquarium puzzle player. You need to fill the aquariums with water up to a certain level or leave it empty. The numbers on the sides indicate how many filled (water) cells must be in each row and column. Indexing starts at 0.",
    cell_at: "{Rule} what is at the cell ({row}, {col})? Choose from {water, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an unknown cell and  \"s\" indicates a filled cell) and your solution (where \"s\" indicates a filled cell and \"e\" indicates an empty cell) in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to assign the cell at ({row}, {col}) with value {value}? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an unknown cell and \"s\" indicates a filled cell), your step-by-step reasoning, and your solution (where \"s\" indicates a filled cell and \"e\" indicates an empty cell) in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step-by-step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const BATTLE_SHIPS: PromptSet = PromptSet {
    rule: "You are a Battle-Ships player. You need to place ships in a grid based on row and column hints. The hints indicate how many ship cells are in each row and column. The numbers of each size ship are given. Ships cannot touch each other, even diagonally. Indexing starts at 0.",
    cell_at: "{Rule} Given the current game state, what is at position ({row}, {col})? Choose from: {ship, empty, unknown}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an unknown cell) and your solution (where \"s\" indicates a ship cell and \"e\" indicates an empty cell) in the following format. { perception: {current state of the grid as a 2D array}, answer: {solution as a 2D array} }",
    valid_action: "{Rule} Given the current game state, is it valid to assign cell ({row}, {col}) with value {value}? Respond with: valid or invalid.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an unknown cell), your step-by-step reasoning, and your solution (where \"s\" indicates a ship cell and \"e\" indicates an empty cell) in the following format. { perception: {current state of the grid as a 2D array}, think: {your step-by-step reasoning}, answer: {solution as a 2D array} }",
};

pub const BINAIRO: PromptSet = PromptSet {
    rule: "You are a Binairo player. You have to fill a grid with white (w) and black (b) pieces. No more than two circles of the same color can be adjacent (horizontally and vertically). Indexing starts at 0.",
    cell_at: "{Rule} what is the value of the cell at ({row}, {col})? Choose from {b, w, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell) and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to fill the cell at ({row}, {col}) with {b, w}? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell), your step-by-step reasoning, and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step-by-step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const COLORED_SUDOKU: PromptSet = PromptSet {
    rule: "You are a Colored-Sudoku player. You have to enter a numerical digit from 1 through N in each cell of a NxN grid, \nThe rule is to make sure unique numbers in each row, column,  and within cells of the same color.  Indexing starts at 0.",
    cell_at: "{Rule} what is the value of the cell at ({row}, {col})? Choose from {1, 2, ..., N, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell) and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to fill the cell at ({row}, {col}) with value {value}? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell), your step-by-step reasoning, and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step-by-step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const FIELD_EXPLORE: PromptSet = PromptSet {
    rule: "You are a Field-Explore player. You need to identify mine locations in a grid based on revealed numbers. Each revealed number indicates how many mines are adjacent to that cell (including diagonals). Indexing starts at 0.",
    cell_at: "{Rule} Given the current game state, what is in the cell at ({row}, {col})? Choose from {mine, number, hidden}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates hidden cells, \"s\" indicates a mine, and numbers represent revealed counts) and your solution (where \"s\" indicates a mine and \"e\" indicates an empty cell) in the following format. { perception: {current state of the grid as a 2D array}, answer: {solution as a 2D array} }",
    valid_action: "{Rule} Given the current game state, is it valid to assign the cell at ({row}, {col}) with {value}? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates hidden cells, \"s\" indicates a mine, and numbers represent revealed counts), your step-by-step reasoning, and your solution (where \"s\" indicates a mine and \"e\" indicates an empty cell) in the following format. { perception: {current state of the grid as a 2D array}, think: {your step-by-step reasoning}, answer: {solution as a 2D array} }",
};

pub const FUTOSHIKI: PromptSet = PromptSet {
    rule: "You are a Futoshiki player. You have to enter a numerical digit from 1 through N in each cell of an NxN grid. The rules are: unique numbers in each row and column; inequality signs between cells must be respected (for example, < means left number is smaller, > means left number is larger). Indexing starts at 0.",
    cell_at: "{Rule} what is the value of the cell at ({row}, {col})? Choose from {1, 2, ..., N, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell) and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to fill the cell at ({row}, {col}) with value {value}? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell), your step-by-step reasoning, and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step-by-step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const HITORI: PromptSet = PromptSet {
    rule: "You are a Hitori player. You need to shade some cells in the grid such that no number appears more than once in each row and column among unshaded cells. The rules are: shaded cells cannot be adjacent; all unshaded cells must be connected. Indexing starts at 0.",
    cell_at: "{Rule} what is the value of the cell at ({row}, {col})? Choose from {1, 2, ..., N}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot and your solution (where \"s\" indicates a shaded cell and \"e\" indicates a cell leave unshaded) in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to shade the cell at ({row}, {col})? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot, your step-by-step reasoning, and your solution (where \"s\" indicates a shaded cell and \"e\" indicates a cell leave unshaded) in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step-by-step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const JIGSAW_SUDOKU: PromptSet = PromptSet {
    rule: "You are a Jigsaw-Sudoku player. You have to enter a numerical digit from 1 through N in each cell of a NxN grid. The rules are: unique numbers in each row, column, and within cells of the same region. Each region is a connected group of cells. Indexing starts at 0.",
    cell_at: "{Rule} Given the current game state in the screenshot, what is the value of the cell at ({row}, {col})? Choose from {1, 2, ..., N, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell) and your solution in the following format. { perception: {current state of the grid as a 2D array}, answer: {solution as a 2D array} }",
    valid_action: "{Rule} Given the current game state in the screenshot, is it valid to fill the cell at ({row}, {col}) with value {value}? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell), your step-by-step reasoning, and your solution in the following format. { perception: {current state of the grid as a 2D array}, think: {your step-by-step reasoning}, answer: {solution as a 2D array} }",
};

pub const KAKURASU: PromptSet = PromptSet {
    rule: "You are a Kakurasu puzzle player. You need to shade some cells in a grid where the sum of the weights of selected cells in each row and column matches the given clues. The weights increase from left to right (for rows) and top to bottom (for columns), starting from 1. Indexing starts at 0.",
    cell_at: "{Rule} what is the value of the cell at ({row}, {col})? Response in a formate of (number, number).",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell) and your solution (where \"s\" indicates a shaded cell and \"e\" indicates a cell leave unshaded) in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to shade the cell at ({row}, {col})? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell), your step-by-step reasoning, and your solution (where \"s\" indicates a shaded cell and \"e\" indicates a cell leave unshaded) in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step-by-step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const KAKURO: PromptSet = PromptSet {
    rule: "You are a Kakuro player. You have to fill in the grid with numbers (1 to N) such that each row and column adds up to the specified sum. The rules are: (1) adjacent numbers should not be the same. (2) numbers add up to the given sum for each row and column. Indexing starts at 0.",
    cell_at: "{Rule} what is the value of the cell at ({row}, {col})? Choose from {1, 2, ..., N, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell) and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to fill the cell at ({row}, {col}) with value {value}? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell), your step-by-step reasoning, and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step-by-step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const KILLER_SUDOKU: PromptSet = PromptSet {
    rule: "You are a Killer-Sudoku player. You have to enter a numerical digit from 1 through N in each cell of an NxN grid. The board is divided into cages based on cell color. The rules are: (1) unique numbers in each row, column, and each sqrt(N)xsqrt(N) block, and (2) the sum of numbers in each cage must equal to the small red number indicating the target sum. Indexing starts at 0.",
    cell_at: "{Rule} what is the cell value (not cage target) at ({row}, {col})? Choose from {1, 2, ..., N, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell) and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array, without red cage targets}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to fill the cell at ({row}, {col}) with value {value}? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell), your step by step reasoning, and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array, without red cage targets}, \n think: {your step by step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const LIGHT_UP: PromptSet = PromptSet {
    rule: "You are a Light-Up player. You have to place light bulbs in the grid such that all empty cells are illuminated. The rules are: light bulbs illuminate their entire row and column until blocked by a wall; numbered walls must have exactly that many bulbs adjacent to them; bulbs cannot illuminate each other. Use Indexing starts at 0.",
    cell_at: "{Rule} What is the value of the cell at ({row}, {col})? Choose from [*, s, w].",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell, \"s\" indicates a light bulb, and \"w\" indicates a wall) and your solution (where \"s\" indicates a light bulb and \"e\" indicates a cell left empty) in the following format. \n{ \n \"perception\": {\"current state of the grid as a 2D array\"}, \n \"answer\": {\"solution as a 2D array\"} \n}",
    valid_action: "{Rule} Is it valid to fill the cell at ({row}, {col}) with a light bulb? Choose from [valid, invalid].",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell, \"s\" indicates a light bulb, and \"w\" indicates a wall), your step-by-step reasoning, and your solution (where \"s\" indicates a light bulb and \"e\" indicates a cell left empty) in the following format. \n{ \n \"perception\": {\"current state of the grid as a 2D array\"}, \n \"think\": {\"your step-by-step reasoning\"}, \n \"answer\": {\"solution as a 2D array\"} \n}",
};

pub const NONOGRAM: PromptSet = PromptSet {
    rule: "You are a Nonogram player. You need to fill in cells in a grid based on numbers at the side of the grid. For each row or column, the numbers indicate the lengths of consecutive shaded cells in that row/column, which must appear in the given order. For example, '2 3' means there must be exactly two blocks of shaded cells - first a block of 2 cells, then a block of 3 cells, with at least one empty cell between them. Each row/column must satisfy its given numbers exactly. Use 's' for shaded cells and 'e' for empty cells. Indexing starts at 0.",
    cell_at: "{Rule} what is the state of the cell at ({row}, {col})? Choose from {shaded, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell and \"s\" indicates a shaded cell) and your solution (\"e\" indicates leaving empty) in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to shade the cell at ({row}, {col})? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell and \"s\" indicates a shaded cell), your step-by-step reasoning, and your solution (\"e\" indicates leaving empty and \"s\" indicates a shaded) in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step-by-step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const ODD_EVEN_SUDOKU: PromptSet = PromptSet {
    rule: "You are an Odd-Even-Sudoku player. You have to enter a numerical digit from 1 through N in each cell of a NxN grid. The rules are: unique numbers in each row, column, and sqrt(N)xsqrt(N) block. Additionally, white cells must contain even numbers, and black cells must contain odd numbers. Indexing starts at 0.",
    cell_at: "{Rule} what is the value of the cell at ({row}, {col})? Choose from {1, 2, ..., N, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell) and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to fill the cell at ({row}, {col}) with value {value}? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell), your step-by-step reasoning, and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step-by-step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const RENZOKU: PromptSet = PromptSet {
    rule: "You are a Renzoku player. You have to enter a numerical digit from 1 through N in each cell of an NxN grid. The rules are: unique numbers in each row, column; A dot between 2 cells indicates that those 2 numbers should be consecutive. Otherwise, the numbers should be non-consecutive. Indexing starts at 0.",
    cell_at: "{Rule} what is the value of the cell at ({row}, {col})? Choose from {1, 2, ..., N, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell) and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to fill the cell at ({row}, {col}) with value {value}? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell), your step-by-step reasoning, and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step-by-step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const SKYSCRAPER: PromptSet = PromptSet {
    rule: "You are a Skyscraper puzzle player. You have to enter a numerical digit from 1 through N in each cell of an NxN grid. The numbers indicate the height of the skyscrapers. The numbers on the sides of the grid indicate how many skyscrapers would you see if you look in the direction of the arrow. Indexing starts at 0.",
    cell_at: "{Rule} what is the value of the cell at ({row}, {col})? Choose from {1, 2, ..., N, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell) and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to fill the cell at ({row}, {col}) with value {value}? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell), your step-by-step reasoning, and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step-by-step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const STAR_BATTLE: PromptSet = PromptSet {
    rule: "You are a Star-Battle player. You have to place stars on the grid such that each row, column, and region contains exactly one star. Additional rule is: stars cannot touch each other, not even diagonally. Use Indexing starts at 0",
    cell_at: "{Rule} what is in the cell at ({row}, {col})? Choose from {star, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell) and your solution (where \"s\" indicates a star and \"e\" indicates leaving empty) in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to place a star at ({row}, {col})? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell), your step by step reasoning, and your solution (where \"s\" indicates a star and \"e\" indicates leaving empty) in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step by step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const SUDOKU: PromptSet = PromptSet {
    rule: "You are a Sudoku player. You have to enter a numerical digit from 1 through N in each cell of a NxN grid made up of four sqrt(N)xsqrt(N) blocks, \n The rule is to make sure unique numbers in each row, column, and block. Indexing starts at 0.",
    cell_at: "{Rule} what is the value of the cell at ({row}, {col})? Choose from {1, 2, ..., N, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell) and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to fill the cell at ({row}, {col}) with value {value}? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates an empty cell), your step-by-step reasoning, and your solution in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step-by-step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const THERMOMETERS: PromptSet = PromptSet {
    rule: "You are a Thermometers puzzle player. You need to fill thermometers. The numbers on the sides indicate how many filled cells must be in each row and column. In the end, all thermometers must be filled from their bulb (start) to their top, without gaps. Use Indexing starts at 0.",
    cell_at: "{Rule} what is in the cell at ({row}, {col})? Choose from {filled, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates not filled) and your solution (where \"s\" indicates a filled cell and \"e\" indicates leaving not filled) in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to assign filled at ({row}, {col})? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"*\" indicates a not filled cell), your step-by-step reasoning, and your solution (where \"s\" indicates a filled cell and \"e\" indicates leaving not filled) in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step-by-step reasoning}, \n answer: {solution as a 2D array} \n}",
};

pub const TREES_AND_TENTS: PromptSet = PromptSet {
    rule: "You are a Trees-and-Tents player. You need to place tents on a grid with trees. Each tree must be paired with exactly one tent that is horizontally or vertically adjacent to it (a 1-to-1 relationship). Tents cannot touch each other, even diagonally. The numbers on the sides indicate how many tents must be in each row and column. Use Indexing starts at 0.",
    cell_at: "{Rule} what is the value of the cell at ({row}, {col})? Choose from {tree, tent, empty}.",
    direct: "{Rule} Give me your response of the current game state in the screenshot (where \"tr\" indicates a tree, \"tt\" indicates a tent, and \"*\" indicates an empty cell) and your solution (\"e\" indicates leaving empty) in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n answer: {solution as a 2D array} \n}",
    valid_action: "{Rule}  is it valid to fill the cell at ({row}, {col}) with value {value}? Choose from {valid, invalid}.",
    cot: "{Rule} Give me your response of the current game state in the screenshot (where \"tr\" indicates a tree, \"tt\" indicates a tent, and \"*\" indicates an empty cell), your step-by-step reasoning, and your solution (\"e\" indicates leaving empty) in the following format. \n{ \n perception: {current state of the grid as a 2D array}, \n think: {your step-by-step reasoning}, \n answer: {solution as a 2D array} \n}",
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::PuzzleId;

    #[test]
    fn every_prompt_set_is_wellformed() {
        for id in PuzzleId::ALL {
            let p = id.prompts();
            assert!(p.rule.starts_with("You are a"), "{id}: rule must open with the player line");
            assert!(p.rule.contains("Indexing starts at 0"), "{id}: rule must pin indexing");
            for (name, t) in [
                ("cell_at", p.cell_at),
                ("direct", p.direct),
                ("valid_action", p.valid_action),
                ("cot", p.cot),
            ] {
                assert!(t.starts_with("{Rule}"), "{id}/{name}: template must lead with {{Rule}}");
            }
            for t in [p.cell_at, p.valid_action] {
                assert!(t.contains("{row}") && t.contains("{col}"), "{id}: cell templates take coordinates");
            }
            assert!(p.direct.contains("perception") && p.direct.contains("answer"));
            assert!(p.cot.contains("think"));
            assert!(!p.direct.contains("think"), "{id}: direct template has no think block");
        }
    }

    #[test]
    fn quirks_are_preserved_verbatim() {
        // These oddities come with the frozen upstream text; normalizing them
        // would silently fork the prompt set.
        assert!(KAKURASU.cell_at.contains("Response in a formate of (number, number)"));
        assert!(!STAR_BATTLE.rule.ends_with('.'));
        assert!(AQUARIUM.direct.contains("unknown cell and  \"s\""));
        assert!(BINAIRO.valid_action.contains("with {b, w}?"));
        assert!(KILLER_SUDOKU.cot.contains("your step by step reasoning"));
        assert!(LIGHT_UP.direct.contains("\"perception\":"));
        assert!(COLORED_SUDOKU.rule.contains("grid, \nThe rule"));
        assert!(SUDOKU.rule.contains("blocks, \n The rule"));
        assert!(!BATTLE_SHIPS.direct.contains('\n'));
        assert!(!FIELD_EXPLORE.direct.contains('\n'));
        assert!(!JIGSAW_SUDOKU.direct.contains('\n'));
    }
}

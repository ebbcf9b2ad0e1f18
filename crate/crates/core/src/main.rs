fn main() {
    println!("binet");
}

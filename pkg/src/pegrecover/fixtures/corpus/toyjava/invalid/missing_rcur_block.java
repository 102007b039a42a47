public class Main {
  public static void main(String[] args) {
    int c = 1;
    while (c < 5) {
      c = c + 1;
    
    System.out.println(c);
  }
}

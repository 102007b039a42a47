public class Main {
  public static void main(String[] args) {
    int b;
    b 4;
    System.out.println(b);
  }
}
